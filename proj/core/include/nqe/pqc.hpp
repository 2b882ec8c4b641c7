#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "nqe/qmath.hpp"
#include "nqe/training.hpp"

namespace nqe {

// The 4 rotation angles of the two-layer classifier circuit.
struct PqcParams {
  std::array<double, 4> theta{};
};

struct PqcTrainConfig {
  // 10-sample batches need well over 30 descent steps before the angles
  // settle; 150 keeps the classifier stage under a second regardless.
  int iterations = 150;
  int batch_size = 10;
  double learning_rate = 0.2;
  EstimatorConfig estimator;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ClassifierOutput {
  double f = 0.0;           // <sigma_z> on qubit 3
  int predicted_label = 1;  // sign(f), sign(0) resolved to +1
};

struct EmbeddedSample {
  StateVector state;
  int label = 0;
};

using EmbeddedDataset = std::vector<EmbeddedSample>;

struct PqcTrainResult {
  PqcParams params;
  std::vector<double> loss_trace;  // one entry per iteration
};

// Classifier circuit on the 3 encoding qubits. Layer k (k = 1, 2):
// Ry(theta_{2k-1}) on qubit 2, Ry(theta_{2k}) on qubit 3, then
// CNOT(control qubit 2 -> target qubit 3); layers composed left to right.
// With all angles zero the two CNOTs cancel and the circuit is the identity.
ComplexMatrix pqc_circuit(const PqcParams& params);

// f = <psi| U(theta)^dag (I (x) I (x) sigma_z) U(theta) |psi>, with the
// documented tie-break sign(0) = +1.
ClassifierOutput classify(const PqcParams& params, const StateVector& embedded);

// Shot-statistics variant: f is the mean of `shots` +/-1 readouts with
// P(+1) = (1 + exact f)/2; deterministic per seed.
ClassifierOutput classify_sampled(const PqcParams& params,
                                  const StateVector& embedded,
                                  std::uint64_t shots, std::uint64_t seed);

// L = (1/m) sum_i (1 - f_i y_i) / 2, in [0, 1]. Throws on an empty batch.
double pqc_loss(const PqcParams& params, std::span<const EmbeddedSample> batch);

// dL/dtheta_k = [L(theta_k + pi/2) - L(theta_k - pi/2)] / 2, exact for Ry
// generators.
std::array<double, 4> parameter_shift_grad(const PqcParams& params,
                                           std::span<const EmbeddedSample> batch);

// Plain gradient descent with parameter-shift gradients over random batches
// drawn uniformly with replacement. Initial angles ~ uniform(-pi, pi) from
// the seed. In sampled estimator mode the recorded loss trace uses shot
// statistics while the gradients stay exact. Deterministic per cfg.seed.
PqcTrainResult train_pqc(const EmbeddedDataset& data, const PqcTrainConfig& cfg);

// Fraction of samples whose predicted label matches the true label.
double evaluate_accuracy(const PqcParams& params, const EmbeddedDataset& data);

// Embeds a whole dataset: through the network when params != nullptr,
// otherwise through the raw feature-map path.
EmbeddedDataset embed_dataset(const MlpParams* params, const Dataset& data,
                              const FeatureMapConfig& fm);

}  // namespace nqe
