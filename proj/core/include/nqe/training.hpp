#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nqe/data.hpp"
#include "nqe/dqc1.hpp"
#include "nqe/embedder.hpp"
#include "nqe/feature_map.hpp"
#include "nqe/rng.hpp"

namespace nqe {

enum class EstimatorMode { exact, sampled };

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::exact;
  std::uint64_t shots = 1024;  // used in sampled mode
};

enum class OptimizerKind { sgd, adam };

// Short-memory moment defaults: with only 15 optimization steps, a 0.9
// first-moment decay would let the first few batches dominate the whole run.
struct AdamConfig {
  double beta1 = 0.5;
  double beta2 = 0.99;
  double epsilon = 1e-8;
};

struct NqeTrainConfig {
  int iterations = 15;
  int batch_pairs = 10;
  double learning_rate = 0.05;
  OptimizerKind optimizer = OptimizerKind::adam;
  AdamConfig adam;
  EstimatorConfig estimator;
  // Shot-noise gradients (parameter-shift on sampled overlap estimates).
  // Off by default: the loss may be reported through the sampled estimator
  // while gradients stay exact.
  bool sampled_gradients = false;
  std::uint64_t seed = 0;

  void validate() const;
};

// One sampled training pair.
struct TrainingPair {
  std::vector<double> x_i;
  std::vector<double> x_j;
  int y_i = 0;
  int y_j = 0;
};

struct PairBatch {
  std::vector<TrainingPair> pairs;
};

struct NqeTraceRecord {
  int iteration = 0;  // 1-based
  double loss = 0.0;  // batch sum, mirroring the summed objective
  double mean_hs_same = 0.0;
  double mean_hs_diff = 0.0;
  double wall_time_s = 0.0;
};

using NqeTrace = std::vector<NqeTraceRecord>;

struct NqeTrainResult {
  MlpParams params;
  NqeTrace trace;
  // checkpoints[0] is the initial network; one entry per iteration after.
  std::vector<MlpParams> checkpoints;
};

// Squared deviation of the overlap's real part from its class target:
// (hs - (1 + y_i y_j)/2)^2; the target is 1 for same-label pairs and 0 for
// different-label pairs.
double pair_loss(double hs_real, int y_i, int y_j);

// Sum of pair_loss over the batch. In sampled mode each pair's overlap is
// estimated with cfg.estimator.shots shots, seeded deterministically from
// (cfg.seed, pair index).
double batch_loss(const MlpParams& params, const PairBatch& batch,
                  const FeatureMapConfig& fm, const NqeTrainConfig& cfg);

struct AngleGradientPair {
  std::vector<double> d_phi1;
  std::vector<double> d_phi2;
};

// Partials of pair_loss with respect to each angle of both embeddings,
// via central finite differences (h = 1e-5) on the exact overlap, with the
// chain factor 2 (hs - target) applied.
AngleGradientPair loss_grad_wrt_angles(const FeatureMapConfig& fm,
                                       const FeatureAngles& phi1,
                                       const FeatureAngles& phi2, int y_i,
                                       int y_j);

// Uniform sampling of ordered pairs with replacement, re-drawn until the
// batch holds at least 3 same-label and 3 different-label pairs (both loss
// targets must be represented). Throws DomainError when the dataset cannot
// satisfy the balance constraint.
PairBatch sample_pair_batch(const Dataset& data, int batch_pairs, Rng& rng);

// Full training loop: per iteration, sample a fresh batch, evaluate the loss,
// backpropagate through feature-map angles into the network, apply the
// optimizer. Deterministic per cfg.seed.
NqeTrainResult train_nqe(const Dataset& data, const FeatureMapConfig& fm,
                         const NqeTrainConfig& cfg, const MlpParams& initial);

// CSV with columns iteration,loss,mean_hs_same,mean_hs_diff. The loss column
// reports the per-pair mean (batch sum / batch_pairs), the shape plotting
// tools expect. `comment` is emitted first as a '#' line when nonempty.
void write_trace_csv(std::ostream& os, const NqeTrace& trace, int batch_pairs,
                     const std::string& comment);

}  // namespace nqe
