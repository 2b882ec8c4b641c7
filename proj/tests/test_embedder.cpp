#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "nqe/embedder.hpp"
#include "nqe/errors.hpp"
#include "nqe/rng.hpp"

using namespace nqe;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Scalar probe loss: dot(upstream, forward(params, x)). The finite-difference
// oracle below differentiates this end to end.
double probe_loss(const MlpParams& params, const std::vector<double>& x,
                  const std::vector<double>& upstream) {
  const FeatureAngles out = forward(params, x);
  double acc = 0.0;
  for (std::size_t i = 0; i < upstream.size(); ++i)
    acc += upstream[i] * out.values[i];
  return acc;
}

}  // namespace

TEST_SUITE("embedder") {

TEST_CASE("init: deterministic, zero biases, bounded weights") {
  const std::vector<int> arch{5, 16, 16, 5};
  const MlpParams a = init_params(arch, 123);
  const MlpParams b = init_params(arch, 123);
  const MlpParams c = init_params(arch, 124);

  CHECK(a.weights == b.weights);
  CHECK(a.biases == b.biases);
  CHECK(a.weights != c.weights);

  for (const auto& layer : a.biases)
    for (double v : layer) CHECK(v == 0.0);

  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    const double bound = kInitWeightScale / std::sqrt(static_cast<double>(arch[l]));
    for (double w : a.weights[l]) CHECK(std::abs(w) <= bound);
  }
}

TEST_CASE("init: sample variance tracks the fan-in scale") {
  // uniform(-b, b) has variance b^2/3 with b = kInitWeightScale/sqrt(fan_in).
  const MlpParams p = init_params({1000, 8}, 7);
  const double target = kInitWeightScale * kInitWeightScale / (3.0 * 1000.0);
  double mean = 0.0;
  for (double w : p.weights[0]) mean += w;
  mean /= static_cast<double>(p.weights[0].size());
  double var = 0.0;
  for (double w : p.weights[0]) var += (w - mean) * (w - mean);
  var /= static_cast<double>(p.weights[0].size() - 1);
  CHECK(var > 0.8 * target);
  CHECK(var < 1.2 * target);
}

TEST_CASE("forward: zero parameters give zero angles") {
  MlpParams p = init_params({5, 4, 5}, 1);
  for (auto& layer : p.weights)
    for (double& w : layer) w = 0.0;
  const FeatureAngles out = forward(p, std::vector<double>{1, 2, 3, 4, 5});
  for (double v : out.values) CHECK(v == 0.0);
}

TEST_CASE("forward: outputs squashed into (-pi, pi)") {
  Rng rng(41);
  const MlpParams p = init_params({5, 16, 16, 5}, 42);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(5);
    for (double& v : x) v = rng.uniform(-50.0, 50.0);
    const FeatureAngles out = forward(p, x);
    for (double v : out.values) {
      CHECK(v > -kPi);
      CHECK(v < kPi);
    }
  }
}

TEST_CASE("forward: scalar hand computation") {
  MlpParams p;
  p.layer_sizes = {1, 1};
  p.weights = {{1.0}};
  p.biases = {{0.0}};
  const FeatureAngles out = forward(p, std::vector<double>{0.5});
  CHECK(out.values[0] == doctest::Approx(kPi * std::tanh(0.5)).epsilon(1e-12));
  CHECK(out.values[0] == doctest::Approx(1.4517839).epsilon(1e-6));
}

TEST_CASE("forward: shape mismatch") {
  const MlpParams p = init_params({5, 4, 5}, 1);
  CHECK_THROWS_AS(forward(p, std::vector<double>{1.0, 2.0}), ShapeError);
}

TEST_CASE("backward: zero upstream gives a zero gradient") {
  const MlpParams p = init_params({5, 8, 5}, 2);
  const std::vector<double> x{0.1, -0.2, 0.3, 0.7, -0.5};
  const EmbedderGradient g = backward(p, x, std::vector<double>(5, 0.0));
  CHECK(g.max_abs() == 0.0);
}

TEST_CASE("backward: matches central finite differences") {
  Rng rng(43);
  for (int trial = 0; trial < 4; ++trial) {
    MlpParams p = init_params({4, 6, 5, 3}, 100 + trial);
    // Random biases exercise the bias path too.
    for (auto& layer : p.biases)
      for (double& b : layer) b = rng.uniform(-0.4, 0.4);

    std::vector<double> x(4), upstream(3);
    for (double& v : x) v = rng.uniform(-1.5, 1.5);
    for (double& v : upstream) v = rng.uniform(-1.0, 1.0);

    const EmbedderGradient g = backward(p, x, upstream);

    const double h = 1e-5;
    double worst_rel = 0.0;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      for (std::size_t i = 0; i < p.weights[l].size(); ++i) {
        MlpParams probe = p;
        probe.weights[l][i] = p.weights[l][i] + h;
        const double up = probe_loss(probe, x, upstream);
        probe.weights[l][i] = p.weights[l][i] - h;
        const double down = probe_loss(probe, x, upstream);
        const double fd = (up - down) / (2.0 * h);
        const double rel =
            std::abs(g.weights[l][i] - fd) / std::max(std::abs(fd), 1e-4);
        worst_rel = std::max(worst_rel, rel);
      }
      for (std::size_t i = 0; i < p.biases[l].size(); ++i) {
        MlpParams probe = p;
        probe.biases[l][i] = p.biases[l][i] + h;
        const double up = probe_loss(probe, x, upstream);
        probe.biases[l][i] = p.biases[l][i] - h;
        const double down = probe_loss(probe, x, upstream);
        const double fd = (up - down) / (2.0 * h);
        const double rel =
            std::abs(g.biases[l][i] - fd) / std::max(std::abs(fd), 1e-4);
        worst_rel = std::max(worst_rel, rel);
      }
    }
    CHECK(worst_rel < 1e-6);
  }
}

TEST_CASE("backward: frozen layers have exactly zero gradients") {
  const MlpParams p = init_params({5, 8, 8, 5}, 3);
  const std::vector<double> x{0.5, -0.1, 0.2, 0.9, -0.7};
  const std::vector<double> upstream{1.0, -2.0, 0.5, 0.25, -0.75};
  const std::vector<bool> frozen{false, true, false};
  const EmbedderGradient g = backward(p, x, upstream, &frozen);

  for (double v : g.weights[1]) CHECK(v == 0.0);
  for (double v : g.biases[1]) CHECK(v == 0.0);
  // The unfrozen layers still receive gradients through the frozen one.
  CHECK(g.max_abs() > 0.0);
  double first_layer_max = 0.0;
  for (double v : g.weights[0]) first_layer_max = std::max(first_layer_max, std::abs(v));
  CHECK(first_layer_max > 0.0);
}

TEST_CASE("parameters: lossless JSON round-trip") {
  const MlpParams p = init_params({5, 16, 16, 5}, 2024);
  const MlpParams q = params_from_json(params_to_json(p));
  CHECK(p.layer_sizes == q.layer_sizes);
  CHECK(p.weights == q.weights);  // bitwise: full double precision
  CHECK(p.biases == q.biases);

  const auto path = std::filesystem::temp_directory_path() / "nqe_params_rt.json";
  save_params(p, path);
  const MlpParams r = load_params(path);
  CHECK(p.weights == r.weights);
  std::filesystem::remove(path);
}

TEST_CASE("parameters: malformed JSON is a format error") {
  CHECK_THROWS_AS(params_from_json("{not json"), FormatError);
  CHECK_THROWS_AS(params_from_json(R"({"schema_version": 9})"), FormatError);
  CHECK_THROWS_AS(
      params_from_json(
          R"({"schema_version":1,"layer_sizes":[2,3],"weights":[[1,2]],"biases":[[0,0,0]]})"),
      ShapeError);
}

}  // TEST_SUITE
