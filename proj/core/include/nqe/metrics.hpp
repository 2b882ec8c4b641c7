#pragma once

#include <cstdint>
#include <vector>

#include "nqe/data.hpp"
#include "nqe/embedder.hpp"
#include "nqe/feature_map.hpp"
#include "nqe/qmath.hpp"

namespace nqe {

// Per-class ensemble states: equal-weight mixtures of the embedded samples.
struct ClassEnsembles {
  DensityMatrix rho_plus;
  DensityMatrix rho_minus;
  std::size_t m_plus = 0;
  std::size_t m_minus = 0;
};

// Uniform depolarizing channel rho -> (1 - lambda) rho + lambda I/dim.
// Trace-preserving and completely positive for lambda in [0, 1]; the single
// noise model exposed for contractivity experiments.
struct DepolarizingChannel {
  double lambda = 0.0;
};

// Embeds every sample and mixes per class. params == nullptr selects the raw
// feature-map path (angles are the stored features, already scaled to
// radians); otherwise angles come from the network.
ClassEnsembles build_ensembles(const MlpParams* params, const Dataset& data,
                               const FeatureMapConfig& fm);

// (1/2) || a - b ||_1 through the Hermitian eigenvalues of the difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Lower bound on the achievable empirical risk of any measurement-based
// binary classifier over these ensembles:
//   1/2 - (1/2) || p_plus rho_plus - p_minus rho_minus ||_1,
// with p_class = m_class / (m_plus + m_minus). The class weights sit inside
// the norm, so imbalanced ensembles are handled as stated.
double risk_lower_bound(const ClassEnsembles& ensembles);

DensityMatrix apply_depolarizing(const DepolarizingChannel& ch,
                                 const DensityMatrix& rho);

struct TraceDistanceStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over pairs
};

// Draws `n_pairs` one-vs-one evaluation pairs (one sample of each class per
// pair, without replacement within a class until exhausted). The result is a
// Dataset whose samples alternate (+1, -1) per pair, the layout
// eval_trace_distance_over_training expects.
Dataset make_eval_pairs(const Dataset& data, int n_pairs, std::uint64_t seed);

// For each checkpoint: mean and standard deviation, over the evaluation
// pairs, of the trace distance between the two embedded pure states of a
// pair. Throws DomainError when eval_pairs is not a list of one-vs-one pairs.
std::vector<TraceDistanceStats> eval_trace_distance_over_training(
    const std::vector<MlpParams>& checkpoints, const Dataset& eval_pairs,
    const FeatureMapConfig& fm);

}  // namespace nqe
