#include "nqe/dqc1.hpp"

#include <cmath>
#include <string>

#include "nqe/errors.hpp"
#include "nqe/rng.hpp"

namespace nqe {

Complex hs_inner_exact(const ComplexMatrix& v1, const ComplexMatrix& v2) {
  if (v1.rows() != v2.rows() || v1.cols() != v2.cols())
    throw ShapeError("hs_inner_exact: operand shapes differ");
  return normalized_trace(matmul(v1, adjoint(v2)));
}

ComplexMatrix build_dqc1_sequence(const FeatureMapConfig& cfg,
                                  const FeatureAngles& phi1,
                                  const FeatureAngles& phi2) {
  cfg.validate();
  const std::size_t dim = std::size_t{1} << cfg.n_qubits;

  const ComplexMatrix v1 = build_feature_map(cfg, phi1);
  const ComplexMatrix v2 = build_feature_map(cfg, phi2);

  // Controlled map on probe |1>: block diag(I, V) with the probe as MSB.
  const auto controlled = [&](const ComplexMatrix& v) {
    ComplexMatrix c(2 * dim, 2 * dim);
    for (std::size_t i = 0; i < dim; ++i) c(i, i) = 1.0;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) c(dim + i, dim + j) = v(i, j);
    return c;
  };

  const ComplexMatrix h_probe = kron(gates::hadamard(), gates::identity(dim));
  const ComplexMatrix cv1 = controlled(v1);
  const ComplexMatrix cv2_dag = adjoint(controlled(v2));

  // Right-to-left application order.
  return matmul(h_probe, matmul(cv2_dag, matmul(cv1, h_probe)));
}

Dqc1Outcome dqc1_exact(const FeatureMapConfig& cfg, const FeatureAngles& phi1,
                       const FeatureAngles& phi2) {
  cfg.validate();
  const std::size_t dim = std::size_t{1} << cfg.n_qubits;
  const ComplexMatrix seq = build_dqc1_sequence(cfg, phi1, phi2);

  // rho_0 = |0><0| (x) I/2^n.
  ComplexMatrix rho0(2 * dim, 2 * dim);
  for (std::size_t i = 0; i < dim; ++i) rho0(i, i) = 1.0 / static_cast<double>(dim);

  const ComplexMatrix evolved = matmul(seq, matmul(rho0, adjoint(seq)));
  // Round-trips through the validating constructor so the mixed-state
  // invariants are enforced after every evolution.
  const DensityMatrix rho_final =
      DensityMatrix::from_matrix(cfg.n_qubits + 1, evolved);

  const ComplexMatrix z_probe = kron(gates::pauli_z(), gates::identity(dim));
  const ComplexMatrix y_probe = kron(gates::pauli_y(), gates::identity(dim));

  Dqc1Outcome out;
  out.expectation_z = real_expectation(z_probe, rho_final);
  // Closing Hadamard maps sigma_y -> -sigma_y; negate so the diagnostic
  // reports +Im Tr[V(phi1) V(phi2)^dag] / 2^n.
  out.expectation_y = -real_expectation(y_probe, rho_final);
  out.shots = 0;
  out.std_error = 0.0;
  return out;
}

Dqc1Outcome dqc1_sampled(const FeatureMapConfig& cfg, const FeatureAngles& phi1,
                         const FeatureAngles& phi2, std::uint64_t shots,
                         std::uint64_t seed) {
  if (shots == 0) throw DomainError("dqc1_sampled: shots must be >= 1");
  const double exact_z = dqc1_exact(cfg, phi1, phi2).expectation_z;
  double p_plus = 0.5 * (1.0 + exact_z);
  if (p_plus < 0.0) p_plus = 0.0;
  if (p_plus > 1.0) p_plus = 1.0;

  Rng rng(seed);
  std::uint64_t plus = 0;
  for (std::uint64_t s = 0; s < shots; ++s)
    if (rng.uniform01() < p_plus) ++plus;

  const double n = static_cast<double>(shots);
  const double mean =
      (2.0 * static_cast<double>(plus) - n) / n;  // mean of +/-1 outcomes
  Dqc1Outcome out;
  out.expectation_z = mean;
  out.shots = shots;
  if (shots >= 2) {
    // Sample variance of +/-1 outcomes: n (1 - mean^2) / (n - 1).
    const double var = n * (1.0 - mean * mean) / (n - 1.0);
    out.std_error = std::sqrt(var > 0.0 ? var : 0.0) / std::sqrt(n);
  }
  return out;
}

ShotPlan plan_shots(double epsilon, double failure_prob) {
  if (!(epsilon > 0.0) || !(epsilon <= 2.0))
    throw DomainError("plan_shots: epsilon must be in (0, 2]");
  if (!(failure_prob > 0.0) || !(failure_prob < 1.0))
    throw DomainError("plan_shots: failure_prob must be in (0, 1)");
  ShotPlan plan;
  plan.epsilon = epsilon;
  plan.failure_prob = failure_prob;
  const double raw = 2.0 * std::log(2.0 / failure_prob) / (epsilon * epsilon);
  plan.shots = static_cast<std::uint64_t>(std::ceil(raw));
  if (plan.shots == 0) plan.shots = 1;
  return plan;
}

}  // namespace nqe
