#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nqe/dqc1.hpp"
#include "nqe/errors.hpp"
#include "support/oracles.hpp"

using namespace nqe;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

FeatureMapConfig cfg3() { return FeatureMapConfig{3, 1}; }

FeatureAngles angles(std::vector<double> v) { return FeatureAngles(std::move(v)); }

}  // namespace

TEST_SUITE("dqc1") {

TEST_CASE("hs_inner_exact: self-overlap is 1 for any unitary") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix u = test::random_unitary(8, rng);
    const Complex hs = hs_inner_exact(u, u);
    CHECK(hs.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(hs.imag()) < 1e-12);
  }
}

TEST_CASE("hs_inner_exact: known angle pairs") {
  const ComplexMatrix v0 = build_feature_map(cfg3(), angles({0, 0, 0, 0, 0}));

  const ComplexMatrix v_pi = build_feature_map(cfg3(), angles({kPi, 0, 0, 0, 0}));
  const Complex hs_pi = hs_inner_exact(v_pi, v0);
  CHECK(hs_pi.real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(hs_pi.imag()) < 1e-12);

  const ComplexMatrix v_half =
      build_feature_map(cfg3(), angles({kPi / 2, 0, 0, 0, 0}));
  CHECK(std::abs(hs_inner_exact(v_half, v0)) < 1e-12);
}

TEST_CASE("hs_inner_exact: shape mismatch") {
  CHECK_THROWS_AS(
      hs_inner_exact(ComplexMatrix::identity(4), ComplexMatrix::identity(8)),
      ShapeError);
}

TEST_CASE("probe sequence is unitary and trivial for equal angles") {
  Rng rng(32);
  const auto phi = test::random_angles(5, rng);
  const ComplexMatrix seq = build_dqc1_sequence(cfg3(), angles(phi), angles(phi));
  CHECK(is_unitary(seq));

  const Dqc1Outcome out = dqc1_exact(cfg3(), angles(phi), angles(phi));
  CHECK(out.expectation_z == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.shots == 0);
  CHECK(out.std_error == 0.0);
}

TEST_CASE("probe z-moment equals the real overlap over 100 random pairs") {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a1 = test::random_angles(5, rng);
    const auto a2 = test::random_angles(5, rng);
    const Dqc1Outcome out = dqc1_exact(cfg3(), angles(a1), angles(a2));
    const Complex oracle = test::hs_overlap_closed_form(3, a1, a2);
    CHECK(std::abs(out.expectation_z - oracle.real()) < 1e-10);
  }
}

TEST_CASE("probe y-moment reports the imaginary overlap (sign convention)") {
  // The closing Hadamard of the sequence conjugates sigma_y to -sigma_y;
  // dqc1_exact absorbs that sign so expectation_y == +Im of the overlap.
  // This test pins the convention.
  Rng rng(34);
  for (int trial = 0; trial < 25; ++trial) {
    const auto a1 = test::random_angles(5, rng);
    const auto a2 = test::random_angles(5, rng);
    const Dqc1Outcome out = dqc1_exact(cfg3(), angles(a1), angles(a2));
    const Complex oracle = test::hs_overlap_closed_form(3, a1, a2);
    REQUIRE(out.expectation_y.has_value());
    CHECK(std::abs(*out.expectation_y - oracle.imag()) < 1e-10);
  }
}

TEST_CASE("pi-angle pair drives the probe to -1") {
  const Dqc1Outcome out =
      dqc1_exact(cfg3(), angles({kPi, 0, 0, 0, 0}), angles({0, 0, 0, 0, 0}));
  CHECK(out.expectation_z == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("swap symmetry of the real overlap") {
  Rng rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a1 = test::random_angles(5, rng);
    const auto a2 = test::random_angles(5, rng);
    const double z12 = dqc1_exact(cfg3(), angles(a1), angles(a2)).expectation_z;
    const double z21 = dqc1_exact(cfg3(), angles(a2), angles(a1)).expectation_z;
    CHECK(std::abs(z12 - z21) < 1e-12);
  }
}

TEST_CASE("sampled: deterministic certainty at equal angles") {
  Rng rng(36);
  const auto phi = test::random_angles(5, rng);
  const Dqc1Outcome out =
      dqc1_sampled(cfg3(), angles(phi), angles(phi), 512, /*seed=*/7);
  CHECK(out.expectation_z == 1.0);
  CHECK(out.std_error == 0.0);
  CHECK(out.shots == 512);
  CHECK(!out.expectation_y.has_value());
}

TEST_CASE("sampled: concentration around a zero-mean pair") {
  // Re overlap is exactly 0 for (pi/2, 0, ...) vs all-zero angles.
  const FeatureAngles a(std::vector<double>{kPi / 2, 0, 0, 0, 0});
  const FeatureAngles b(std::vector<double>(5, 0.0));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dqc1Outcome out = dqc1_sampled(cfg3(), a, b, 10000, seed);
    CHECK(std::abs(out.expectation_z) < 0.05);
  }
}

TEST_CASE("sampled: standard error shrinks with the shot count") {
  const FeatureAngles a(std::vector<double>{0.3, -0.7, 0.2, 0.4, -0.1});
  const FeatureAngles b(std::vector<double>{-0.2, 0.5, 0.9, -0.3, 0.6});
  const Dqc1Outcome coarse = dqc1_sampled(cfg3(), a, b, 100, 5);
  const Dqc1Outcome fine = dqc1_sampled(cfg3(), a, b, 1000000, 5);
  CHECK(fine.std_error < coarse.std_error);
  CHECK(fine.std_error > 0.0);
}

TEST_CASE("sampled: identical seeds give identical outcomes") {
  const FeatureAngles a(std::vector<double>{0.3, -0.7, 0.2, 0.4, -0.1});
  const FeatureAngles b(std::vector<double>{-0.2, 0.5, 0.9, -0.3, 0.6});
  const Dqc1Outcome x = dqc1_sampled(cfg3(), a, b, 4096, 99);
  const Dqc1Outcome y = dqc1_sampled(cfg3(), a, b, 4096, 99);
  CHECK(x.expectation_z == y.expectation_z);
  CHECK(x.std_error == y.std_error);
}

TEST_CASE("sampled estimator is unbiased across seeds") {
  const FeatureAngles a(std::vector<double>{0.4, -0.2, 0.8, 0.1, -0.5});
  const FeatureAngles b(std::vector<double>{-0.6, 0.3, 0.2, 0.7, 0.2});
  const double exact = dqc1_exact(cfg3(), a, b).expectation_z;

  const int n_runs = 120;
  std::vector<double> estimates(n_runs);
  for (int s = 0; s < n_runs; ++s)
    estimates[s] = dqc1_sampled(cfg3(), a, b, 1000, 1000 + s).expectation_z;

  const double mean =
      std::accumulate(estimates.begin(), estimates.end(), 0.0) / n_runs;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (n_runs - 1);
  const double pooled_se = std::sqrt(var / n_runs);
  CHECK(std::abs(mean - exact) < 3.0 * pooled_se + 1e-12);
}

TEST_CASE("plan_shots: documented Hoeffding arithmetic") {
  const ShotPlan plan = plan_shots(0.1, 0.05);
  CHECK(plan.shots == 738);  // ceil(2 ln(40) / 0.01)

  CHECK(plan_shots(2.0, 0.5).shots == 1);

  // Halving epsilon quadruples the budget (up to ceiling effects).
  std::uint64_t prev = 0;
  for (double eps : {0.8, 0.4, 0.2, 0.1}) {
    const std::uint64_t shots = plan_shots(eps, 0.05).shots;
    if (prev > 0) {
      CHECK(shots >= 4 * prev - 4);
      CHECK(shots <= 4 * prev + 4);
    }
    prev = shots;
  }
}

TEST_CASE("plan_shots: domain errors") {
  CHECK_THROWS_AS(plan_shots(0.0, 0.05), DomainError);
  CHECK_THROWS_AS(plan_shots(2.5, 0.05), DomainError);
  CHECK_THROWS_AS(plan_shots(0.1, 0.0), DomainError);
  CHECK_THROWS_AS(plan_shots(0.1, 1.0), DomainError);
}

TEST_CASE("Hoeffding guarantee holds empirically") {
  const ShotPlan plan = plan_shots(0.1, 0.05);
  Rng rng(37);
  int violations = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const auto a1 = test::random_angles(5, rng);
    const auto a2 = test::random_angles(5, rng);
    const double exact = dqc1_exact(cfg3(), angles(a1), angles(a2)).expectation_z;
    const double sampled =
        dqc1_sampled(cfg3(), angles(a1), angles(a2), plan.shots,
                     derive_seed(4242, static_cast<std::uint64_t>(t)))
            .expectation_z;
    if (std::abs(sampled - exact) > plan.epsilon) ++violations;
  }
  // Allowed failure rate plus ~3 sigma of binomial slack.
  CHECK(static_cast<double>(violations) / trials <= 0.05 + 0.03);
}

}  // TEST_SUITE
