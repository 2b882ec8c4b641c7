#include "nqe/metrics.hpp"

#include <cmath>
#include <string>

#include "nqe/errors.hpp"
#include "nqe/rng.hpp"

namespace nqe {

namespace {

StateVector embed_sample(const MlpParams* params, const Sample& s,
                         const FeatureMapConfig& fm) {
  if (params) return embed_state(fm, forward(*params, s.features));
  const std::size_t expected = 2 * static_cast<std::size_t>(fm.n_qubits) - 1;
  if (s.features.size() != expected)
    throw ShapeError("raw embedding needs " + std::to_string(expected) +
                     " features, got " + std::to_string(s.features.size()));
  return embed_state(fm, FeatureAngles(s.features));
}

}  // namespace

ClassEnsembles build_ensembles(const MlpParams* params, const Dataset& data,
                               const FeatureMapConfig& fm) {
  fm.validate();
  if (!data.has_both_labels())
    throw DomainError("build_ensembles: dataset must contain both labels");

  std::vector<StateVector> plus, minus;
  for (const Sample& s : data.samples)
    (s.label == 1 ? plus : minus).push_back(embed_sample(params, s, fm));

  return ClassEnsembles{DensityMatrix::equal_mixture(plus),
                        DensityMatrix::equal_mixture(minus), plus.size(),
                        minus.size()};
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim())
    throw ShapeError("trace_distance: dimension mismatch");
  ComplexMatrix diff = sub(a.matrix(), b.matrix());
  // Canonical orientation: flip the sign when the first nonzero entry points
  // "negative", so trace_distance(a, b) and trace_distance(b, a) run the
  // identical eigensolve and agree bitwise.
  for (const Complex& v : diff.entries()) {
    if (v == Complex{}) continue;
    const bool flip = v.real() < 0.0 || (v.real() == 0.0 && v.imag() < 0.0);
    if (flip)
      for (Complex& w : diff.entries()) w = -w;
    break;
  }
  double sum = 0.0;
  for (double lambda : hermitian_eigenvalues(diff)) sum += std::abs(lambda);
  return 0.5 * sum;
}

double risk_lower_bound(const ClassEnsembles& ensembles) {
  const double total =
      static_cast<double>(ensembles.m_plus + ensembles.m_minus);
  const double p_plus = static_cast<double>(ensembles.m_plus) / total;
  const double p_minus = static_cast<double>(ensembles.m_minus) / total;
  const ComplexMatrix weighted =
      sub(scale(ensembles.rho_plus.matrix(), p_plus),
          scale(ensembles.rho_minus.matrix(), p_minus));
  double norm1 = 0.0;
  for (double lambda : hermitian_eigenvalues(weighted)) norm1 += std::abs(lambda);
  return 0.5 - 0.5 * norm1;
}

DensityMatrix apply_depolarizing(const DepolarizingChannel& ch,
                                 const DensityMatrix& rho) {
  if (!(ch.lambda >= 0.0 && ch.lambda <= 1.0))
    throw DomainError("apply_depolarizing: lambda must be in [0, 1]");
  const double dim = static_cast<double>(rho.dim());
  ComplexMatrix out = scale(rho.matrix(), 1.0 - ch.lambda);
  for (std::size_t i = 0; i < rho.dim(); ++i) out(i, i) += ch.lambda / dim;
  return DensityMatrix::from_matrix(rho.n_qubits(), std::move(out));
}

Dataset make_eval_pairs(const Dataset& data, int n_pairs, std::uint64_t seed) {
  if (n_pairs < 1) throw DomainError("make_eval_pairs: n_pairs must be >= 1");
  if (!data.has_both_labels())
    throw DomainError("make_eval_pairs: dataset must contain both labels");

  std::vector<std::size_t> plus_idx, minus_idx;
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    (data.samples[i].label == 1 ? plus_idx : minus_idx).push_back(i);

  Rng rng(seed);
  rng.shuffle(plus_idx);
  rng.shuffle(minus_idx);

  Dataset pairs;
  pairs.split_tag = data.split_tag;
  pairs.pca = data.pca;
  pairs.provenance = data.provenance;
  pairs.provenance.description += " [one-vs-one evaluation pairs]";
  for (int p = 0; p < n_pairs; ++p) {
    // Cycle through each class's shuffled order when pairs outnumber samples.
    pairs.samples.push_back(data.samples[plus_idx[p % plus_idx.size()]]);
    pairs.samples.push_back(data.samples[minus_idx[p % minus_idx.size()]]);
  }
  return pairs;
}

std::vector<TraceDistanceStats> eval_trace_distance_over_training(
    const std::vector<MlpParams>& checkpoints, const Dataset& eval_pairs,
    const FeatureMapConfig& fm) {
  fm.validate();
  if (eval_pairs.samples.empty() || eval_pairs.samples.size() % 2 != 0)
    throw DomainError("eval pairs: expected a nonempty even-length sample list");
  for (std::size_t i = 0; i + 1 < eval_pairs.samples.size(); i += 2)
    if (eval_pairs.samples[i].label == eval_pairs.samples[i + 1].label)
      throw DomainError("eval pairs: pair " + std::to_string(i / 2) +
                        " is not one-vs-one");

  const std::size_t n_pairs = eval_pairs.samples.size() / 2;
  std::vector<TraceDistanceStats> stats;
  stats.reserve(checkpoints.size());
  for (const MlpParams& params : checkpoints) {
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t p = 0; p < n_pairs; ++p) {
      const StateVector a =
          embed_sample(&params, eval_pairs.samples[2 * p], fm);
      const StateVector b =
          embed_sample(&params, eval_pairs.samples[2 * p + 1], fm);
      const double d = trace_distance(DensityMatrix::from_pure(a),
                                      DensityMatrix::from_pure(b));
      sum += d;
      sum2 += d * d;
    }
    TraceDistanceStats st;
    const double n = static_cast<double>(n_pairs);
    st.mean = sum / n;
    if (n_pairs >= 2) {
      const double var = (sum2 - sum * sum / n) / (n - 1.0);
      st.stddev = std::sqrt(var > 0.0 ? var : 0.0);
    }
    stats.push_back(st);
  }
  return stats;
}

}  // namespace nqe
