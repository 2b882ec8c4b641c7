#include <benchmark/benchmark.h>

#include "nqe/dqc1.hpp"
#include "nqe/embedder.hpp"
#include "nqe/feature_map.hpp"
#include "nqe/metrics.hpp"
#include "nqe/pqc.hpp"
#include "nqe/qmath.hpp"
#include "nqe/rng.hpp"

using namespace nqe;

namespace {

ComplexMatrix random_square(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = Complex{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return m;
}

FeatureAngles random_angles(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(5);
  for (double& x : v) x = rng.uniform(-3.14, 3.14);
  return FeatureAngles(v);
}

}  // namespace

static void BM_matmul(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const ComplexMatrix a = random_square(n, 1);
  const ComplexMatrix b = random_square(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
}
BENCHMARK(BM_matmul)->Arg(8)->Arg(16)->Arg(32);

static void BM_kron(benchmark::State& state) {
  const ComplexMatrix a = random_square(4, 3);
  const ComplexMatrix b = random_square(8, 4);
  for (auto _ : state) benchmark::DoNotOptimize(kron(a, b));
}
BENCHMARK(BM_kron);

static void BM_hermitian_eigenvalues(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = rng.uniform(-1.0, 1.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      h(i, j) = Complex{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      h(j, i) = std::conj(h(i, j));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eigenvalues(h));
}
BENCHMARK(BM_hermitian_eigenvalues)->Arg(8)->Arg(16);

static void BM_build_feature_map(benchmark::State& state) {
  const FeatureMapConfig cfg;
  const FeatureAngles phi = random_angles(6);
  for (auto _ : state) benchmark::DoNotOptimize(build_feature_map(cfg, phi));
}
BENCHMARK(BM_build_feature_map);

static void BM_dqc1_exact(benchmark::State& state) {
  const FeatureMapConfig cfg;
  const FeatureAngles a = random_angles(7);
  const FeatureAngles b = random_angles(8);
  for (auto _ : state) benchmark::DoNotOptimize(dqc1_exact(cfg, a, b));
}
BENCHMARK(BM_dqc1_exact);

static void BM_dqc1_sampled_1k(benchmark::State& state) {
  const FeatureMapConfig cfg;
  const FeatureAngles a = random_angles(9);
  const FeatureAngles b = random_angles(10);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(dqc1_sampled(cfg, a, b, 1000, ++seed));
}
BENCHMARK(BM_dqc1_sampled_1k);

static void BM_embedder_forward(benchmark::State& state) {
  const MlpParams params = init_params({5, 2, 5}, 11);
  const std::vector<double> x{0.3, -0.8, 1.2, 0.1, -0.4};
  for (auto _ : state) benchmark::DoNotOptimize(forward(params, x));
}
BENCHMARK(BM_embedder_forward);

static void BM_embedder_backward(benchmark::State& state) {
  const MlpParams params = init_params({5, 2, 5}, 12);
  const std::vector<double> x{0.3, -0.8, 1.2, 0.1, -0.4};
  const std::vector<double> upstream{1.0, -0.5, 0.25, 0.7, -0.1};
  for (auto _ : state) benchmark::DoNotOptimize(backward(params, x, upstream));
}
BENCHMARK(BM_embedder_backward);

static void BM_angle_gradient(benchmark::State& state) {
  const FeatureMapConfig cfg;
  const FeatureAngles a = random_angles(13);
  const FeatureAngles b = random_angles(14);
  for (auto _ : state)
    benchmark::DoNotOptimize(loss_grad_wrt_angles(cfg, a, b, 1, -1));
}
BENCHMARK(BM_angle_gradient);

static void BM_classify(benchmark::State& state) {
  const FeatureMapConfig cfg;
  const StateVector psi = embed_state(cfg, random_angles(15));
  PqcParams theta;
  theta.theta = {0.3, -0.9, 1.4, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(classify(theta, psi));
}
BENCHMARK(BM_classify);

static void BM_parameter_shift_grad(benchmark::State& state) {
  const FeatureMapConfig cfg;
  EmbeddedDataset batch;
  for (int i = 0; i < 10; ++i)
    batch.push_back({embed_state(cfg, random_angles(100 + i)), i % 2 ? 1 : -1});
  PqcParams theta;
  theta.theta = {0.3, -0.9, 1.4, 0.2};
  for (auto _ : state)
    benchmark::DoNotOptimize(parameter_shift_grad(theta, batch));
}
BENCHMARK(BM_parameter_shift_grad);

static void BM_trace_distance(benchmark::State& state) {
  const FeatureMapConfig cfg;
  const DensityMatrix a = DensityMatrix::from_pure(embed_state(cfg, random_angles(16)));
  const DensityMatrix b = DensityMatrix::from_pure(embed_state(cfg, random_angles(17)));
  for (auto _ : state) benchmark::DoNotOptimize(trace_distance(a, b));
}
BENCHMARK(BM_trace_distance);

BENCHMARK_MAIN();
