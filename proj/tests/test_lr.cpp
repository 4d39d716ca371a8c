#include "curstat/isotonic.hpp"
#include "curstat/likelihood_ratio.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

using namespace curstat;
using Catch::Matchers::WithinAbs;

namespace {

const double infinity = std::numeric_limits<double>::infinity();

CurrentStatusSample two_negatives() {
  return CurrentStatusSample::from_observations(std::vector<double>{1.0, 2.0}, std::vector<int>{0, 0});
}

LrConfig small_calibration() {
  LrConfig config;
  config.calibration.sample_size = 200;
  config.calibration.replicates = 200;
  config.calibration.seed = 8;
  return config;
}

}  // namespace

TEST_CASE("LR of the two-point all-negative sample", "[lr]") {
  const auto sample = two_negatives();
  CHECK_THAT(lr_statistic(sample, 1.5, 0.5), WithinAbs(2.0 * std::log(2.0), 1e-12));
  CHECK_THAT(LrProfile(sample, 1.5)(0.5), WithinAbs(2.0 * std::log(2.0), 1e-12));
  CHECK(lr_statistic(sample, 1.5, 0.0) == 0.0);
  // Constraint raises the value at time 2 to theta: LR(theta) = -2 log(1 - theta).
  for (double theta = 0.05; theta < 1.0; theta += 0.05) {
    REQUIRE_THAT(lr_statistic(sample, 1.5, theta), WithinAbs(-2.0 * std::log1p(-theta), 1e-12));
  }
}

TEST_CASE("LR vanishes at the MLE value", "[lr][property]") {
  testing::Engine rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const auto sample = testing::random_sample(rng, testing::integer(rng, 1, 50), 20);
    const auto mle = fit_mle(sample);
    const double t0 = sample.upper() * (0.01 + 0.99 * testing::unit(rng));
    REQUIRE(lr_statistic(sample, t0, mle(t0)) == 0.0);
    const LrProfile profile(sample, t0);
    REQUIRE(profile.mle_value() == mle(t0));
    REQUIRE(profile(mle(t0)) == 0.0);
  }
}

TEST_CASE("impossible constraints give an infinite statistic", "[lr]") {
  // A negative after t0 cannot coexist with F(t0) = 1.
  const auto sample = CurrentStatusSample::from_observations(std::vector<double>{1.0, 2.0}, std::vector<int>{1, 0});
  CHECK(lr_statistic(sample, 1.5, 1.0) == infinity);
  CHECK(LrProfile(sample, 1.5)(1.0) == infinity);
  // A positive before t0 cannot coexist with F(t0) = 0.
  CHECK(lr_statistic(sample, 1.5, 0.0) == infinity);
  CHECK(LrProfile(sample, 1.5)(0.0) == infinity);
  // With every time at or before t0 the cap at 1 is inactive.
  CHECK(lr_statistic(two_negatives(), 2.0, 1.0) == 0.0);
}

TEST_CASE("LR argument checks", "[lr]") {
  const auto sample = two_negatives();
  CHECK_THROWS_AS(lr_statistic(sample, 0.0, 0.5), InvalidInput);
  CHECK_THROWS_AS(lr_statistic(sample, 2.5, 0.5), InvalidInput);
  CHECK_THROWS_AS(LrProfile(sample, -1.0), InvalidInput);
  CHECK_THROWS_AS(LrProfile(sample, 1.0)(1.5), InvalidInput);
  CHECK_THROWS_AS(lr_interval(sample, 1.5, -1.0), InvalidInput);
  CHECK_THROWS_AS(lr_interval(sample, 1.5, 1.0, 0.0), InvalidInput);
  LrConfig config;
  CHECK_THROWS_AS(lr_interval(sample, 1.5, config), InvalidInput);
}

TEST_CASE("profile agrees with the direct statistic", "[lr][property]") {
  testing::Engine rng(62);
  for (int trial = 0; trial < 200; ++trial) {
    const auto sample = testing::random_sample(rng, testing::integer(rng, 1, 60), 15);
    const double t0 = sample.upper() * (0.01 + 0.99 * testing::unit(rng));
    const LrProfile profile(sample, t0);
    for (int k = 0; k <= 20; ++k) {
      const double theta = k / 20.0;
      const double direct = lr_statistic(sample, t0, theta);
      const double fast = profile(theta);
      REQUIRE(fast >= 0.0);
      if (std::isinf(direct)) {
        REQUIRE(fast == direct);
      } else {
        REQUIRE_THAT(fast, WithinAbs(direct, 1e-9 * (1.0 + direct)));
      }
    }
  }
}

TEST_CASE("LR interval examples", "[lr]") {
  // One pooled block of four positives in twelve around t0 = 1.5: MLE value 1/3, off the grid.
  const std::vector<double> times{1.0, 2.0};
  const std::vector<std::int64_t> weights{6, 6}, positives{4, 0};
  const auto third = CurrentStatusSample::from_counts(times, weights, positives);
  SECTION("huge d accepts the whole grid") {
    const auto interval = lr_interval(third, 1.5, 1e6);
    CHECK(interval.lower == 0.001);
    CHECK(interval.upper == 0.999);
  }
  SECTION("d = 0 keeps only the MLE value") {
    const auto interval = lr_interval(third, 1.5, 0.0);
    CHECK(interval.lower == 1.0 / 3.0);
    CHECK(interval.upper == 1.0 / 3.0);
  }
  SECTION("two-point sample with d = 1") {
    const auto sample = two_negatives();
    const auto interval = lr_interval(sample, 1.5, 1.0);
    CHECK(interval.lower == 0.0);
    CHECK(interval.upper == 0.393);
    const auto refined = lr_interval(sample, 1.5, 1.0, 0.001, true);
    CHECK_THAT(refined.upper, WithinAbs(1.0 - std::exp(-0.5), 1e-12));
    CHECK(refined.lower == 0.0);
  }
  SECTION("config overload") {
    LrConfig config;
    config.critical_value = 1.0;
    config.theta_step = 0.01;
    const auto interval = lr_interval(two_negatives(), 1.5, config);
    CHECK(interval.upper == 0.39);
  }
}

TEST_CASE("LR interval is the hull of the accepted grid", "[lr][property]") {
  testing::Engine rng(64);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sample = testing::random_sample(rng, testing::integer(rng, 5, 80), 20);
    const double t0 = sample.upper() * (0.05 + 0.95 * testing::unit(rng));
    const double d = 4.0 * testing::unit(rng);
    const auto interval = lr_interval(sample, t0, d, 0.01);
    const double mle_value = fit_mle(sample)(t0);
    REQUIRE(interval.lower <= mle_value);
    REQUIRE(interval.upper >= mle_value);
    for (int k = 1; k < 100; ++k) {
      const double theta = k / 100.0;
      const bool inside = theta >= interval.lower && theta <= interval.upper;
      if (!inside) REQUIRE(lr_statistic(sample, t0, theta) > d);
    }
    const auto refined = lr_interval(sample, t0, d, 0.01, true);
    REQUIRE(refined.lower <= interval.lower);
    REQUIRE(refined.lower >= interval.lower - 0.01);
    REQUIRE(refined.upper >= interval.upper);
    REQUIRE(refined.upper <= interval.upper + 0.01);
  }
}

TEST_CASE("critical value calibration", "[lr]") {
  LrConfig config = small_calibration();
  const double d = calibrate_critical_value(config);
  CHECK(d > 0.0);
  CHECK(calibrate_critical_value(config) == d);
  config.threads = 3;
  CHECK(calibrate_critical_value(config) == d);
  config.alpha = 0.999;
  CHECK(calibrate_critical_value(config) <= d);
  config.alpha = 0.5;
  CHECK(calibrate_critical_value(config) < d);
}

TEST_CASE("Banerjee-Wellner band", "[lr]") {
  testing::Engine rng(65);
  const auto sample = testing::random_continuous_sample(rng, 150, 2.0);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(10, 0.2, 2.0);
  LrConfig config;
  config.critical_value = 2.27;
  config.theta_step = 0.01;
  const auto band = ci_banerjee_wellner(sample, grid, config);
  const auto mle = fit_mle(sample);
  CHECK(band.method == Method::banerjee_wellner);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    REQUIRE(band.estimate(i) == mle(grid(i)));
    REQUIRE(band.lower(i) <= band.estimate(i));
    REQUIRE(band.upper(i) >= band.estimate(i));
    const auto interval = lr_interval(sample, grid(i), config);
    REQUIRE(band.lower(i) == interval.lower);
    REQUIRE(band.upper(i) == interval.upper);
  }
  config.threads = 3;
  CHECK(ci_banerjee_wellner(sample, grid, config) == band);
  CHECK_THROWS_AS(ci_banerjee_wellner(sample, Eigen::VectorXd::LinSpaced(3, 0.0, 1.0), config), InvalidInput);
  // Without a critical value the band calibrates one.
  LrConfig calibrating = small_calibration();
  calibrating.theta_step = 0.01;
  const auto calibrated = ci_banerjee_wellner(sample, grid, calibrating);
  calibrating.critical_value = calibrate_critical_value(small_calibration());
  CHECK(ci_banerjee_wellner(sample, grid, calibrating) == calibrated);
}
