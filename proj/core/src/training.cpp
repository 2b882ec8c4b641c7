#include "nqe/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "nqe/errors.hpp"

namespace nqe {

namespace {

constexpr double kFdStep = 1e-5;

double hs_real_exact(const FeatureMapConfig& fm, const FeatureAngles& phi1,
                     const FeatureAngles& phi2) {
  return hs_inner_exact(build_feature_map(fm, phi1), build_feature_map(fm, phi2))
      .real();
}

double target_for(int y_i, int y_j) {
  return 0.5 * (1.0 + static_cast<double>(y_i) * static_cast<double>(y_j));
}

}  // namespace

void NqeTrainConfig::validate() const {
  if (iterations < 1) throw DomainError("NqeTrainConfig: iterations must be >= 1");
  if (batch_pairs < 1) throw DomainError("NqeTrainConfig: batch_pairs must be >= 1");
  if (!(learning_rate >= 0.0))
    throw DomainError("NqeTrainConfig: learning_rate must be >= 0");
  if (estimator.mode == EstimatorMode::sampled && estimator.shots < 1)
    throw DomainError("NqeTrainConfig: sampled mode needs shots >= 1");
}

double pair_loss(double hs_real, int y_i, int y_j) {
  if ((y_i != 1 && y_i != -1) || (y_j != 1 && y_j != -1))
    throw DomainError("pair_loss: labels must be +1 or -1");
  const double diff = hs_real - target_for(y_i, y_j);
  return diff * diff;
}

double batch_loss(const MlpParams& params, const PairBatch& batch,
                  const FeatureMapConfig& fm, const NqeTrainConfig& cfg) {
  double total = 0.0;
  for (std::size_t p = 0; p < batch.pairs.size(); ++p) {
    const TrainingPair& pair = batch.pairs[p];
    const FeatureAngles phi1 = forward(params, pair.x_i);
    const FeatureAngles phi2 = forward(params, pair.x_j);
    double hs;
    if (cfg.estimator.mode == EstimatorMode::sampled) {
      hs = dqc1_sampled(fm, phi1, phi2, cfg.estimator.shots,
                        derive_seed(cfg.seed, p))
               .expectation_z;
    } else {
      hs = dqc1_exact(fm, phi1, phi2).expectation_z;
    }
    total += pair_loss(hs, pair.y_i, pair.y_j);
  }
  return total;
}

AngleGradientPair loss_grad_wrt_angles(const FeatureMapConfig& fm,
                                       const FeatureAngles& phi1,
                                       const FeatureAngles& phi2, int y_i,
                                       int y_j) {
  const double hs = hs_real_exact(fm, phi1, phi2);
  const double chain = 2.0 * (hs - target_for(y_i, y_j));

  AngleGradientPair grad;
  grad.d_phi1.resize(phi1.values.size());
  grad.d_phi2.resize(phi2.values.size());

  FeatureAngles probe = phi1;
  for (std::size_t k = 0; k < phi1.values.size(); ++k) {
    probe.values[k] = phi1.values[k] + kFdStep;
    const double up = hs_real_exact(fm, probe, phi2);
    probe.values[k] = phi1.values[k] - kFdStep;
    const double down = hs_real_exact(fm, probe, phi2);
    probe.values[k] = phi1.values[k];
    grad.d_phi1[k] = chain * (up - down) / (2.0 * kFdStep);
  }
  probe = phi2;
  for (std::size_t k = 0; k < phi2.values.size(); ++k) {
    probe.values[k] = phi2.values[k] + kFdStep;
    const double up = hs_real_exact(fm, phi1, probe);
    probe.values[k] = phi2.values[k] - kFdStep;
    const double down = hs_real_exact(fm, phi1, probe);
    probe.values[k] = phi2.values[k];
    grad.d_phi2[k] = chain * (up - down) / (2.0 * kFdStep);
  }
  return grad;
}

namespace {

// Parameter-shift angle gradient on sampled overlap estimates. Both the
// single-Z and the neighboring-ZZ generators have +/-1 spectra, so the exact
// +/- pi/2 shift rule applies to every angle.
AngleGradientPair sampled_loss_grad_wrt_angles(const FeatureMapConfig& fm,
                                               const FeatureAngles& phi1,
                                               const FeatureAngles& phi2,
                                               int y_i, int y_j,
                                               std::uint64_t shots,
                                               std::uint64_t seed) {
  constexpr double kShift = 1.5707963267948966;  // pi/2
  std::uint64_t stream = 0;
  const auto estimate = [&](const FeatureAngles& a, const FeatureAngles& b) {
    return dqc1_sampled(fm, a, b, shots, derive_seed(seed, stream++)).expectation_z;
  };

  const double hs = estimate(phi1, phi2);
  const double chain = 2.0 * (hs - target_for(y_i, y_j));

  AngleGradientPair grad;
  grad.d_phi1.resize(phi1.values.size());
  grad.d_phi2.resize(phi2.values.size());

  FeatureAngles probe = phi1;
  for (std::size_t k = 0; k < phi1.values.size(); ++k) {
    probe.values[k] = phi1.values[k] + kShift;
    const double up = estimate(probe, phi2);
    probe.values[k] = phi1.values[k] - kShift;
    const double down = estimate(probe, phi2);
    probe.values[k] = phi1.values[k];
    grad.d_phi1[k] = chain * (up - down) / 2.0;
  }
  probe = phi2;
  for (std::size_t k = 0; k < phi2.values.size(); ++k) {
    probe.values[k] = phi2.values[k] + kShift;
    const double up = estimate(phi1, probe);
    probe.values[k] = phi2.values[k] - kShift;
    const double down = estimate(phi1, probe);
    probe.values[k] = phi2.values[k];
    grad.d_phi2[k] = chain * (up - down) / 2.0;
  }
  return grad;
}

class Optimizer {
 public:
  Optimizer(const NqeTrainConfig& cfg, const MlpParams& params) : cfg_(cfg) {
    if (cfg.optimizer == OptimizerKind::adam) {
      m_ = EmbedderGradient::zeros_like(params);
      v_ = EmbedderGradient::zeros_like(params);
    }
  }

  void step(MlpParams& params, const EmbedderGradient& grad) {
    if (cfg_.optimizer == OptimizerKind::sgd) {
      for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (std::size_t i = 0; i < params.weights[l].size(); ++i)
          params.weights[l][i] -= cfg_.learning_rate * grad.weights[l][i];
        for (std::size_t i = 0; i < params.biases[l].size(); ++i)
          params.biases[l][i] -= cfg_.learning_rate * grad.biases[l][i];
      }
      return;
    }
    ++t_;
    const double b1 = cfg_.adam.beta1;
    const double b2 = cfg_.adam.beta2;
    const double corr1 = 1.0 - std::pow(b1, t_);
    const double corr2 = 1.0 - std::pow(b2, t_);
    const auto update = [&](std::vector<double>& p, std::vector<double>& m,
                            std::vector<double>& v, const std::vector<double>& g) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double m_hat = m[i] / corr1;
        const double v_hat = v[i] / corr2;
        p[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.adam.epsilon);
      }
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
      update(params.weights[l], m_.weights[l], v_.weights[l], grad.weights[l]);
      update(params.biases[l], m_.biases[l], v_.biases[l], grad.biases[l]);
    }
  }

 private:
  const NqeTrainConfig& cfg_;
  EmbedderGradient m_, v_;
  int t_ = 0;
};

}  // namespace

PairBatch sample_pair_batch(const Dataset& data, int batch_pairs, Rng& rng) {
  if (!data.has_both_labels())
    throw DomainError("sample_pair_batch: dataset must contain both labels");
  const std::size_t n = data.samples.size();
  const int need_each = std::min(3, batch_pairs / 2);

  constexpr int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    PairBatch batch;
    batch.pairs.reserve(batch_pairs);
    int same = 0, diff = 0;
    for (int p = 0; p < batch_pairs; ++p) {
      const Sample& a = data.samples[rng.below(n)];
      const Sample& b = data.samples[rng.below(n)];
      (a.label == b.label ? same : diff) += 1;
      batch.pairs.push_back({a.features, b.features, a.label, b.label});
    }
    if (same >= need_each && diff >= need_each) return batch;
  }
  throw DomainError(
      "sample_pair_batch: could not draw a label-balanced batch; the dataset "
      "is too imbalanced");
}

NqeTrainResult train_nqe(const Dataset& data, const FeatureMapConfig& fm,
                         const NqeTrainConfig& cfg, const MlpParams& initial) {
  fm.validate();
  cfg.validate();
  initial.validate();
  if (!data.has_both_labels())
    throw DomainError("train_nqe: dataset must contain both labels");
  if (initial.output_size() != 2 * fm.n_qubits - 1)
    throw ShapeError("train_nqe: network output size must equal the angle count");
  for (const Sample& s : data.samples)
    if (s.features.size() != static_cast<std::size_t>(initial.input_size()))
      throw ShapeError("train_nqe: feature size does not match the network input");

  NqeTrainResult result;
  result.params = initial;
  result.checkpoints.push_back(initial);

  Rng pair_rng(derive_seed(cfg.seed, "nqe/pairs"));
  Optimizer opt(cfg, result.params);

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    const PairBatch batch = sample_pair_batch(data, cfg.batch_pairs, pair_rng);

    EmbedderGradient grad = EmbedderGradient::zeros_like(result.params);
    double loss_sum = 0.0;
    double hs_same_sum = 0.0, hs_diff_sum = 0.0;
    int n_same = 0, n_diff = 0;

    for (std::size_t p = 0; p < batch.pairs.size(); ++p) {
      const TrainingPair& pair = batch.pairs[p];
      const FeatureAngles phi1 = forward(result.params, pair.x_i);
      const FeatureAngles phi2 = forward(result.params, pair.x_j);

      double hs_for_loss;
      if (cfg.estimator.mode == EstimatorMode::sampled) {
        const std::uint64_t pair_seed =
            derive_seed(derive_seed(cfg.seed, "nqe/shots"),
                        static_cast<std::uint64_t>(iter) * 1000 + p);
        hs_for_loss =
            dqc1_sampled(fm, phi1, phi2, cfg.estimator.shots, pair_seed)
                .expectation_z;
      } else {
        hs_for_loss = dqc1_exact(fm, phi1, phi2).expectation_z;
      }
      loss_sum += pair_loss(hs_for_loss, pair.y_i, pair.y_j);
      if (pair.y_i == pair.y_j) {
        hs_same_sum += hs_for_loss;
        ++n_same;
      } else {
        hs_diff_sum += hs_for_loss;
        ++n_diff;
      }

      AngleGradientPair angle_grad;
      if (cfg.sampled_gradients) {
        const std::uint64_t grad_seed =
            derive_seed(derive_seed(cfg.seed, "nqe/grad-shots"),
                        static_cast<std::uint64_t>(iter) * 1000 + p);
        angle_grad = sampled_loss_grad_wrt_angles(
            fm, phi1, phi2, pair.y_i, pair.y_j, cfg.estimator.shots, grad_seed);
      } else {
        angle_grad = loss_grad_wrt_angles(fm, phi1, phi2, pair.y_i, pair.y_j);
      }
      grad.accumulate(backward(result.params, pair.x_i, angle_grad.d_phi1));
      grad.accumulate(backward(result.params, pair.x_j, angle_grad.d_phi2));
    }

    opt.step(result.params, grad);
    result.checkpoints.push_back(result.params);

    const auto t1 = std::chrono::steady_clock::now();
    NqeTraceRecord rec;
    rec.iteration = iter;
    rec.loss = loss_sum;
    rec.mean_hs_same = n_same > 0 ? hs_same_sum / n_same : 0.0;
    rec.mean_hs_diff = n_diff > 0 ? hs_diff_sum / n_diff : 0.0;
    rec.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    result.trace.push_back(rec);
  }
  return result;
}

void write_trace_csv(std::ostream& os, const NqeTrace& trace, int batch_pairs,
                     const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "iteration,loss,mean_hs_same,mean_hs_diff\n";
  char buf[128];
  for (const NqeTraceRecord& rec : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", rec.iteration,
                  rec.loss / static_cast<double>(batch_pairs), rec.mean_hs_same,
                  rec.mean_hs_diff);
    os << buf;
  }
}

}  // namespace nqe
