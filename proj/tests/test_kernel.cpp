#include "curstat/kernel.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace curstat;
using Catch::Matchers::WithinAbs;

namespace {

const Kernel families[] = {Kernel::triweight, Kernel::epanechnikov};

using testing::reference_density;
using testing::reference_integrated;

// Test-side K~(x) = int IK(x - w) K(w) dw by Simpson on the polynomial pieces.
double reference_convolution(Kernel k, double x) {
  return testing::piecewise_simpson(
      [&](double w) { return reference_integrated(k, x - w) * reference_density(k, w); }, -1.0, 1.0,
      {x - 1.0, x + 1.0}, 2000);
}

// Rejection sampler for the kernel density, independent of curstat::draw.
double reference_draw(Kernel k, testing::Engine& rng) {
  const double peak = reference_density(k, 0.0);
  for (;;) {
    const double u = 2.0 * testing::unit(rng) - 1.0;
    if (testing::unit(rng) * peak <= reference_density(k, u)) return u;
  }
}

}  // namespace

TEST_CASE("kernel density values", "[kernel]") {
  CHECK(density(Kernel::triweight, 0.0) == 35.0 / 32.0);
  CHECK(density(Kernel::epanechnikov, 0.0) == 0.75);
  for (Kernel k : families) {
    CHECK(density(k, 1.0) == 0.0);
    CHECK(density(k, -1.0) == 0.0);
    CHECK(density(k, 3.0) == 0.0);
    for (double u = -0.99; u < 1.0; u += 0.01) {
      REQUIRE_THAT(density(k, u), WithinAbs(reference_density(k, u), 1e-14));
    }
  }
}

TEST_CASE("integrated kernel values", "[kernel]") {
  for (Kernel k : families) {
    CHECK(integrated(k, 0.0) == 0.5);
    CHECK(integrated(k, 1.0) == 1.0);
    CHECK(integrated(k, -1.0) == 0.0);
    CHECK(integrated(k, 7.0) == 1.0);
  }
  // 0.5 + (35/32)(1/2 - 1/8 + 3/160 - 1/896) = 0.929443359375, also by quadrature below.
  CHECK_THAT(integrated(Kernel::triweight, 0.5), WithinAbs(0.929443359375, 1e-15));
  CHECK_THAT(integrated(Kernel::triweight, 0.5),
             WithinAbs(testing::simpson([](double v) { return testing::triweight(v); }, -1.0, 0.5, 2000), 1e-13));
  // Cross-check by quadrature of the density.
  for (Kernel k : families) {
    for (double u = -0.9; u < 1.0; u += 0.3) {
      const double q = testing::simpson([k](double v) { return reference_density(k, v); }, -1.0, u, 2000);
      REQUIRE_THAT(integrated(k, u), WithinAbs(q, 1e-12));
    }
  }
}

TEST_CASE("integrated kernel identities", "[kernel][property]") {
  for (Kernel k : families) {
    double previous = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double u = -1.2 + 2.4 * i / 10000.0;
      REQUIRE_THAT(integrated(k, u) + integrated(k, -u), WithinAbs(1.0, 1e-14));
      REQUIRE(integrated(k, u) >= previous);
      previous = integrated(k, u);
    }
    for (double u = -0.99; u < 0.99; u += 0.01) {
      const double step = 1e-5;
      const double slope = (integrated(k, u + step) - integrated(k, u - step)) / (2 * step);
      REQUIRE_THAT(slope, WithinAbs(density(k, u), 1e-8));
    }
  }
}

TEST_CASE("kernel moments", "[kernel]") {
  CHECK(roughness(Kernel::triweight) == 350.0 / 429.0);
  CHECK(roughness(Kernel::epanechnikov) == 0.6);
  for (Kernel k : families) {
    const double r = testing::simpson([k](double u) { return std::pow(reference_density(k, u), 2); },
                                      -1.0, 1.0, 2000);
    CHECK_THAT(roughness(k), WithinAbs(r, 1e-10));
    const double m2 = testing::simpson([k](double u) { return u * u * reference_density(k, u); },
                                       -1.0, 1.0, 2000);
    CHECK_THAT(second_moment(k), WithinAbs(m2, 1e-10));
  }
}

TEST_CASE("Eigen array overloads match the scalar functions", "[kernel]") {
  const Eigen::ArrayXd u = Eigen::ArrayXd::LinSpaced(41, -2.0, 2.0);
  const Eigen::ArrayXd d = density(Kernel::triweight, u);
  const Eigen::ArrayXd c = integrated(Kernel::epanechnikov, u);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    REQUIRE(d(i) == density(Kernel::triweight, u(i)));
    REQUIRE(c(i) == integrated(Kernel::epanechnikov, u(i)));
  }
}

TEST_CASE("convolution kernel", "[kernel]") {
  for (Kernel k : families) {
    CHECK_THAT(convolution_cdf(k, 0.0), WithinAbs(0.5, 1e-15));
    CHECK(convolution_cdf(k, 2.0) == 1.0);
    CHECK(convolution_cdf(k, -2.0) == 0.0);
    CHECK(convolution_cdf(k, 5.0) == 1.0);
    for (double x = -1.9; x < 2.0; x += 0.1) {
      REQUIRE_THAT(convolution_cdf(k, x), WithinAbs(reference_convolution(k, x), 1e-10));
    }
  }
}

TEST_CASE("convolution kernel identities", "[kernel][property]") {
  for (Kernel k : families) {
    double previous = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double x = -2.2 + 4.4 * i / 10000.0;
      const double value = convolution_cdf(k, x);
      REQUIRE_THAT(value + convolution_cdf(k, -x), WithinAbs(1.0, 1e-13));
      REQUIRE(value >= previous - 1e-15);
      previous = value;
    }
  }
}

TEST_CASE("convolution kernel matches the law of a sum of two kernel draws", "[kernel][statistical]") {
  testing::Engine rng(21);
  const int draws = 10'000'000;
  int below = 0;
  for (int i = 0; i < draws; ++i) {
    if (reference_draw(Kernel::triweight, rng) + reference_draw(Kernel::triweight, rng) <= 0.7) ++below;
  }
  CHECK_THAT(convolution_cdf(Kernel::triweight, 0.7), WithinAbs(static_cast<double>(below) / draws, 3e-4));
}

TEST_CASE("boundary weight", "[kernel]") {
  const double upper = 2.0;
  const double h = 0.5;
  for (Kernel k : families) {
    for (double x = 0.0; x <= upper; x += 0.125) {
      REQUIRE_THAT(boundary_weight(k, 0.0, x, h, upper, WeightKind::integrated), WithinAbs(0.0, 1e-15));
      REQUIRE_THAT(boundary_weight(k, upper, x, h, upper, WeightKind::integrated), WithinAbs(1.0, 1e-15));
      REQUIRE_THAT(boundary_weight(k, 0.0, x, h, upper, WeightKind::convolution), WithinAbs(0.0, 1e-14));
      REQUIRE_THAT(boundary_weight(k, upper, x, h, upper, WeightKind::convolution), WithinAbs(1.0, 1e-14));
    }
    // Away from both ends the reflections vanish.
    for (double x = 0.6; x <= 1.4; x += 0.1) {
      const double t = 1.0;
      REQUIRE_THAT(boundary_weight(k, t, x, 0.3, upper, WeightKind::integrated),
                   WithinAbs(scaled_integrated(k, t - x, 0.3), 1e-15));
    }
  }
}

TEST_CASE("boundary weight argument checks", "[kernel]") {
  CHECK_THROWS_AS(boundary_weight(Kernel::triweight, 1.0, 1.0, 0.0, 2.0, WeightKind::integrated), InvalidInput);
  CHECK_THROWS_AS(boundary_weight(Kernel::triweight, 1.0, 1.0, 2.5, 2.0, WeightKind::integrated), InvalidInput);
  CHECK_THROWS_AS(boundary_weight(Kernel::triweight, 1.0, 1.0, 0.7, 2.0, WeightKind::convolution), InvalidInput);
  CHECK_NOTHROW(boundary_weight(Kernel::triweight, 1.0, 1.0, 2.0 / 3.0, 2.0, WeightKind::convolution));
  CHECK_NOTHROW(boundary_weight(Kernel::triweight, 1.0, 1.0, 1.5, 2.0, WeightKind::integrated));
  CHECK_THROWS_AS(boundary_weight(Kernel::triweight, -0.1, 1.0, 0.5, 2.0, WeightKind::integrated), InvalidInput);
  CHECK_THROWS_AS(boundary_weight(Kernel::triweight, 1.0, 2.1, 0.5, 2.0, WeightKind::integrated), InvalidInput);
  try {
    boundary_weight(Kernel::triweight, 1.0, 1.0, 0.7, 2.0, WeightKind::convolution);
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("M/3") != std::string::npos);
  }
}

TEST_CASE("reflected integrated weight is a distribution function in t", "[kernel][property]") {
  testing::Engine rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const double upper = 0.5 + 5.0 * testing::unit(rng);
    const double h = upper * (0.01 + 0.99 * testing::unit(rng));
    const double x = upper * testing::unit(rng);
    double previous = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double t = i == 200 ? upper : upper * i / 200.0;
      const double w = boundary_weight(Kernel::triweight, t, x, h, upper, WeightKind::integrated);
      REQUIRE(w >= previous - 1e-14);
      REQUIRE(w >= -1e-14);
      REQUIRE(w <= 1.0 + 1e-14);
      previous = w;
    }
  }
}

TEST_CASE("kernel draws follow the kernel law", "[kernel][statistical]") {
  for (Kernel k : families) {
    RandomStream rng(31, static_cast<std::uint64_t>(k));
    const int n = 200000;
    std::vector<double> values(n);
    for (double& v : values) v = draw(k, rng);
    std::sort(values.begin(), values.end());
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
      sup = std::max(sup, std::abs(integrated(k, values[static_cast<std::size_t>(i)]) - (i + 1.0) / n));
    }
    CHECK(sup < 0.005);
    CHECK(values.front() >= -1.0);
    CHECK(values.back() <= 1.0);
  }
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly", "[kernel]") {
  const QuadratureRule rule = gauss_legendre(20);
  CHECK_THAT(rule.weights.sum(), WithinAbs(2.0, 1e-14));
  for (int degree = 0; degree < 40; ++degree) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) sum += rule.weights(i) * std::pow(rule.nodes(i), degree);
    const double exact = degree % 2 ? 0.0 : 2.0 / (degree + 1);
    REQUIRE_THAT(sum, WithinAbs(exact, 1e-13));
  }
}

TEST_CASE("kernel names round-trip", "[kernel]") {
  for (Kernel k : families) CHECK(parse_kernel(to_string(k)) == k);
  CHECK_THROWS_AS(parse_kernel("gaussian"), InvalidInput);
}
