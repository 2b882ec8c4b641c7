#include "nqe/feature_map.hpp"

#include <cmath>
#include <string>

#include "nqe/errors.hpp"

namespace nqe {

void FeatureMapConfig::validate() const {
  if (n_qubits < 2)
    throw DomainError("FeatureMapConfig: ZZ couplings need at least 2 qubits");
  if (n_qubits > 5)
    throw DomainError("FeatureMapConfig: register capped at 5 qubits");
  if (layers < 1) throw DomainError("FeatureMapConfig: layers must be >= 1");
}

FeatureAngles::FeatureAngles(std::vector<double> v) : values(std::move(v)) {
  for (double x : values)
    if (!std::isfinite(x)) throw DomainError("FeatureAngles: non-finite angle");
}

namespace {

void check_angle_count(const FeatureMapConfig& cfg, const FeatureAngles& phi) {
  const std::size_t expected = 2 * static_cast<std::size_t>(cfg.n_qubits) - 1;
  if (phi.values.size() != expected)
    throw ShapeError("feature map expects " + std::to_string(expected) +
                     " angles, got " + std::to_string(phi.values.size()));
}

}  // namespace

std::vector<double> diagonal_phases(const FeatureMapConfig& cfg,
                                    const FeatureAngles& phi) {
  cfg.validate();
  check_angle_count(cfg, phi);
  const int n = cfg.n_qubits;
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> phases(dim, 0.0);
  for (std::size_t b = 0; b < dim; ++b) {
    double theta = 0.0;
    // z_k = +1/-1 for bit (n-k) of b clear/set; qubit 1 is the MSB.
    for (int k = 1; k <= n; ++k) {
      const double zk = ((b >> (n - k)) & 1u) ? -1.0 : 1.0;
      theta += phi.values[static_cast<std::size_t>(k - 1)] * zk;
    }
    for (int k = 1; k <= n - 1; ++k) {
      const double zk = ((b >> (n - k)) & 1u) ? -1.0 : 1.0;
      const double zk1 = ((b >> (n - k - 1)) & 1u) ? -1.0 : 1.0;
      theta += phi.values[static_cast<std::size_t>(n + k - 1)] * zk * zk1;
    }
    phases[b] = theta;
  }
  return phases;
}

ComplexMatrix build_feature_map(const FeatureMapConfig& cfg,
                                const FeatureAngles& phi) {
  const std::vector<double> phases = diagonal_phases(cfg, phi);
  const ComplexMatrix diag = matrix_exp_diagonal(phases);

  ComplexMatrix h_all = gates::hadamard();
  for (int k = 1; k < cfg.n_qubits; ++k) h_all = kron(h_all, gates::hadamard());

  const ComplexMatrix layer = matmul(diag, h_all);
  ComplexMatrix v = layer;
  for (int m = 1; m < cfg.layers; ++m) v = matmul(layer, v);
  return v;
}

StateVector embed_state(const FeatureMapConfig& cfg, const FeatureAngles& phi) {
  const ComplexMatrix v = build_feature_map(cfg, phi);
  return apply(v, StateVector::computational_basis(cfg.n_qubits, 0));
}

}  // namespace nqe
