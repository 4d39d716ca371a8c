#pragma once

// Test-side generators and oracles. Kernel formulas, quadrature and
// enumeration here are written independently of the library code they check.

#include "curstat/kernel.hpp"
#include "curstat/sample.hpp"
#include "curstat/step_function.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace testing {

using Engine = std::mt19937_64;

inline double unit(Engine& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline int integer(Engine& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Raw observations with times on a coarse lattice, so ties are common.
struct RawData {
  std::vector<double> times;
  std::vector<int> indicators;
};

inline RawData random_raw(Engine& rng, int n, int lattice, double scale = 1.0) {
  RawData out;
  const double p_shift = unit(rng);
  for (int i = 0; i < n; ++i) {
    const double t = scale * integer(rng, 1, lattice);
    out.times.push_back(t);
    // Indicator more likely for later times, with noise so that PAVA pools.
    const double p = std::clamp(t / (scale * lattice) + (p_shift - 0.5) * 0.6, 0.05, 0.95);
    out.indicators.push_back(unit(rng) < p ? 1 : 0);
  }
  return out;
}

inline curstat::CurrentStatusSample random_sample(Engine& rng, int n, int lattice,
                                                  double scale = 1.0) {
  const RawData raw = random_raw(rng, n, lattice, scale);
  return curstat::CurrentStatusSample::from_observations(raw.times, raw.indicators);
}

/// Continuous times on (0, upper) with upper attached as M.
inline curstat::CurrentStatusSample random_continuous_sample(Engine& rng, int n, double upper) {
  std::vector<double> times;
  std::vector<int> indicators;
  for (int i = 0; i < n; ++i) {
    const double t = upper * (0.02 + 0.96 * unit(rng));
    times.push_back(t);
    indicators.push_back(unit(rng) < t / upper ? 1 : 0);
  }
  return curstat::CurrentStatusSample::from_observations(times, indicators, upper);
}

// Kernel polynomials, written out again from their definitions.
inline double triweight(double u) {
  return std::abs(u) >= 1.0 ? 0.0 : 35.0 / 32.0 * std::pow(1.0 - u * u, 3);
}
inline double epanechnikov(double u) { return std::abs(u) >= 1.0 ? 0.0 : 0.75 * (1.0 - u * u); }

inline double reference_density(curstat::Kernel k, double u) {
  return k == curstat::Kernel::triweight ? triweight(u) : epanechnikov(u);
}

// Antiderivatives written out from the polynomial densities.
inline double reference_integrated(curstat::Kernel k, double u) {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  if (k == curstat::Kernel::epanechnikov) return 0.5 + 0.75 * (u - u * u * u / 3.0);
  return 0.5 + 35.0 / 32.0 * (u - std::pow(u, 3) + 0.6 * std::pow(u, 5) - std::pow(u, 7) / 7.0);
}

/// Composite Simpson rule with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (b <= a) return 0.0;
  const double step = (b - a) / panels;
  double total = f(a) + f(b);
  for (int k = 1; k < panels; ++k) total += f(a + k * step) * (k % 2 ? 4.0 : 2.0);
  return total * step / 3.0;
}

/// Simpson on each piece between sorted breakpoints clipped to [a, b]; exact
/// enough for piecewise polynomials whose kinks are all listed.
inline double piecewise_simpson(const std::function<double(double)>& f, double a, double b,
                                std::vector<double> cuts, int panels) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::vector<double> points;
  for (double c : cuts) {
    if (c >= a && c <= b) points.push_back(c);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    total += simpson(f, points[k], points[k + 1], panels);
  }
  return total;
}

/// Weighted alpha-quantile: the smallest value whose cumulative weight reaches alpha.
inline double weighted_quantile(std::vector<std::pair<double, double>> value_weight, double alpha) {
  std::sort(value_weight.begin(), value_weight.end());
  double total = 0.0;
  for (const auto& vw : value_weight) total += vw.second;
  double running = 0.0;
  for (const auto& vw : value_weight) {
    running += vw.second;
    if (running >= alpha * total - 1e-12) return vw.first;
  }
  return value_weight.back().first;
}

/// Left-hand side of the integrated-estimator identity by quadrature:
///   int_0^M {IK_h(t-u) + IK_h(t+u) - IK_h(2M-t-u)} dF(u),
/// F the boundary-corrected smoothed estimate built from `jumps`, whose
/// density sum_x m_x {K_h(u-x) + K_h(u+x) + K_h(2M-u-x)} is formed here.
inline double reflected_identity_lhs(curstat::Kernel k, const curstat::Jumps& jumps, double t,
                                     double h, double upper, int panels = 200) {
  const auto big_k = [&](double v) { return reference_integrated(k, v / h); };
  const auto small_k = [&](double v) { return reference_density(k, v / h) / h; };
  const auto integrand = [&](double u) {
    double density = 0.0;
    for (Eigen::Index i = 0; i < jumps.locations.size(); ++i) {
      const double x = jumps.locations(i);
      density += jumps.masses(i) * (small_k(u - x) + small_k(u + x) + small_k(2 * upper - u - x));
    }
    return (big_k(t - u) + big_k(t + u) - big_k(2 * upper - t - u)) * density;
  };
  std::vector<double> cuts;
  for (double c : {t, -t, 2 * upper - t}) {
    cuts.push_back(c - h);
    cuts.push_back(c + h);
  }
  for (Eigen::Index i = 0; i < jumps.locations.size(); ++i) {
    const double x = jumps.locations(i);
    for (double c : {x, -x, 2 * upper - x}) {
      cuts.push_back(c - h);
      cuts.push_back(c + h);
    }
  }
  return piecewise_simpson(integrand, 0.0, upper, cuts, panels);
}

}  // namespace testing
