#include "nqe/pqc.hpp"

#include <cmath>
#include <string>

#include "nqe/errors.hpp"
#include "nqe/rng.hpp"

namespace nqe {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr int kQubits = 3;
constexpr std::size_t kDim = 8;

ComplexMatrix ry(double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  return ComplexMatrix::from_rows({{c, -s}, {s, c}});
}

// CNOT with the control on the more significant qubit of the pair.
ComplexMatrix cnot_msb_control() {
  return ComplexMatrix::from_rows({{1, 0, 0, 0},
                                   {0, 1, 0, 0},
                                   {0, 0, 0, 1},
                                   {0, 0, 1, 0}});
}

void check_register(const StateVector& psi) {
  if (psi.n_qubits() != kQubits)
    throw ShapeError("classifier expects a " + std::to_string(kQubits) +
                     "-qubit state, got " + std::to_string(psi.n_qubits()));
}

}  // namespace

void PqcTrainConfig::validate() const {
  if (iterations < 1) throw DomainError("PqcTrainConfig: iterations must be >= 1");
  if (batch_size < 1) throw DomainError("PqcTrainConfig: batch_size must be >= 1");
  if (!(learning_rate >= 0.0))
    throw DomainError("PqcTrainConfig: learning_rate must be >= 0");
  if (estimator.mode == EstimatorMode::sampled && estimator.shots < 1)
    throw DomainError("PqcTrainConfig: sampled mode needs shots >= 1");
}

ComplexMatrix pqc_circuit(const PqcParams& params) {
  // Layer k: Ry on qubit 2, Ry on qubit 3, CNOT(2 -> 3), twice. With all
  // angles zero the two CNOTs cancel and the circuit is the identity.
  const ComplexMatrix cnot23 = kron(gates::identity(2), cnot_msb_control());
  ComplexMatrix u = gates::identity(kDim);
  for (int layer = 0; layer < 2; ++layer) {
    const ComplexMatrix rotations =
        kron(gates::identity(2),
             kron(ry(params.theta[2 * layer]), ry(params.theta[2 * layer + 1])));
    u = matmul(cnot23, matmul(rotations, u));
  }
  return u;
}

ClassifierOutput classify(const PqcParams& params, const StateVector& embedded) {
  check_register(embedded);
  const StateVector evolved = apply(pqc_circuit(params), embedded);
  // <sigma_z> on qubit 3 (least significant bit): diagonal +/-1 weights.
  double f = 0.0;
  for (std::size_t b = 0; b < kDim; ++b) {
    const double w = (b & 1u) ? -1.0 : 1.0;
    f += w * std::norm(evolved.amplitudes()[b]);
  }
  ClassifierOutput out;
  out.f = f;
  out.predicted_label = f >= 0.0 ? 1 : -1;  // sign(0) = +1 tie-break
  return out;
}

ClassifierOutput classify_sampled(const PqcParams& params,
                                  const StateVector& embedded,
                                  std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw DomainError("classify_sampled: shots must be >= 1");
  const double exact_f = classify(params, embedded).f;
  double p_plus = 0.5 * (1.0 + exact_f);
  if (p_plus < 0.0) p_plus = 0.0;
  if (p_plus > 1.0) p_plus = 1.0;
  Rng rng(seed);
  std::uint64_t plus = 0;
  for (std::uint64_t s = 0; s < shots; ++s)
    if (rng.uniform01() < p_plus) ++plus;
  ClassifierOutput out;
  out.f = (2.0 * static_cast<double>(plus) - static_cast<double>(shots)) /
          static_cast<double>(shots);
  out.predicted_label = out.f >= 0.0 ? 1 : -1;
  return out;
}

double pqc_loss(const PqcParams& params, std::span<const EmbeddedSample> batch) {
  if (batch.empty()) throw DomainError("pqc_loss: empty batch");
  double total = 0.0;
  for (const EmbeddedSample& s : batch) {
    if (s.label != 1 && s.label != -1)
      throw DomainError("pqc_loss: labels must be +1 or -1");
    const double f = classify(params, s.state).f;
    total += 0.5 * (1.0 - f * static_cast<double>(s.label));
  }
  return total / static_cast<double>(batch.size());
}

std::array<double, 4> parameter_shift_grad(const PqcParams& params,
                                           std::span<const EmbeddedSample> batch) {
  std::array<double, 4> grad{};
  PqcParams shifted = params;
  for (std::size_t k = 0; k < grad.size(); ++k) {
    shifted.theta[k] = params.theta[k] + kPi / 2.0;
    const double up = pqc_loss(shifted, batch);
    shifted.theta[k] = params.theta[k] - kPi / 2.0;
    const double down = pqc_loss(shifted, batch);
    shifted.theta[k] = params.theta[k];
    grad[k] = (up - down) / 2.0;
  }
  return grad;
}

PqcTrainResult train_pqc(const EmbeddedDataset& data, const PqcTrainConfig& cfg) {
  cfg.validate();
  bool plus = false, minus = false;
  for (const EmbeddedSample& s : data) {
    if (s.label == 1) plus = true;
    if (s.label == -1) minus = true;
  }
  if (!plus || !minus)
    throw DomainError("train_pqc: dataset must contain both labels");

  Rng init_rng(derive_seed(cfg.seed, "pqc/init"));
  Rng batch_rng(derive_seed(cfg.seed, "pqc/batches"));

  PqcTrainResult result;
  for (double& t : result.params.theta) t = init_rng.uniform(-kPi, kPi);

  std::vector<EmbeddedSample> batch;
  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    batch.clear();
    for (int i = 0; i < cfg.batch_size; ++i)
      batch.push_back(data[batch_rng.below(data.size())]);

    double recorded_loss;
    if (cfg.estimator.mode == EstimatorMode::sampled) {
      // Shot-statistics loss for the trace; gradients below stay exact.
      double total = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::uint64_t f_seed =
            derive_seed(derive_seed(cfg.seed, "pqc/shots"),
                        static_cast<std::uint64_t>(iter) * 1000 + i);
        const double f =
            classify_sampled(result.params, batch[i].state, cfg.estimator.shots,
                             f_seed)
                .f;
        total += 0.5 * (1.0 - f * static_cast<double>(batch[i].label));
      }
      recorded_loss = total / static_cast<double>(batch.size());
    } else {
      recorded_loss = pqc_loss(result.params, batch);
    }
    result.loss_trace.push_back(recorded_loss);

    const std::array<double, 4> grad = parameter_shift_grad(result.params, batch);
    for (std::size_t k = 0; k < grad.size(); ++k)
      result.params.theta[k] -= cfg.learning_rate * grad[k];
  }
  return result;
}

double evaluate_accuracy(const PqcParams& params, const EmbeddedDataset& data) {
  if (data.empty()) throw DomainError("evaluate_accuracy: empty dataset");
  std::size_t correct = 0;
  for (const EmbeddedSample& s : data)
    if (classify(params, s.state).predicted_label == s.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

EmbeddedDataset embed_dataset(const MlpParams* params, const Dataset& data,
                              const FeatureMapConfig& fm) {
  fm.validate();
  EmbeddedDataset out;
  out.reserve(data.samples.size());
  for (const Sample& s : data.samples) {
    StateVector state = params
                            ? embed_state(fm, forward(*params, s.features))
                            : embed_state(fm, FeatureAngles(s.features));
    out.push_back(EmbeddedSample{std::move(state), s.label});
  }
  return out;
}

}  // namespace nqe
