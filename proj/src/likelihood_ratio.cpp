#include "curstat/likelihood_ratio.hpp"

#include "curstat/errors.hpp"
#include "curstat/isotonic.hpp"
#include "curstat/parallel.hpp"
#include "curstat/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace curstat {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

// f log p + (w - f) log(1 - p) with 0 log 0 = 0.
double bernoulli_term(std::int64_t ones, std::int64_t total, double p) {
  double out = 0.0;
  const std::int64_t zeros = total - ones;
  if (ones > 0) out += p <= 0.0 ? -infinity : static_cast<double>(ones) * std::log(p);
  if (zeros > 0) out += p >= 1.0 ? -infinity : static_cast<double>(zeros) * std::log1p(-p);
  return out;
}

void check_t0(const CurrentStatusSample& sample, double t0) {
  if (sample.empty()) throw InvalidInput("cannot compute a likelihood ratio for an empty sample");
  if (!(t0 > 0.0) || t0 > sample.upper()) throw InvalidInput("t0 must lie in (0, M]");
}

}  // namespace

void LrConfig::validate() const {
  if (critical_value && !(*critical_value >= 0.0)) {
    throw InvalidInput("critical value must be nonnegative");
  }
  if (!(theta_step > 0.0 && theta_step <= 0.1)) throw InvalidInput("theta step must lie in (0, 0.1]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  if (calibration.sample_size < 1 || calibration.replicates < 1) {
    throw InvalidInput("calibration needs a positive sample size and replicate count");
  }
}

double lr_statistic(const CurrentStatusSample& sample, double t0, double theta0) {
  check_t0(sample, t0);
  const double free = log_likelihood_at_times(sample, fit_mle(sample).values());
  const double constrained =
      log_likelihood_at_times(sample, fit_constrained_mle(sample, t0, theta0).values());
  if (constrained == -infinity) return infinity;
  return std::max(0.0, 2.0 * (free - constrained));
}

LrProfile::LrProfile(const CurrentStatusSample& sample, double t0) {
  check_t0(sample, t0);
  const Eigen::Index m = sample.distinct();
  const CountVector& ones = sample.positives();
  const CountVector& total = sample.weights();
  split_ = detail::count_not_after(sample.times(), t0);

  Eigen::VectorXd values(m);
  detail::write_block_values(detail::pool_adjacent_violators(ones, total, 0, split_), values);
  detail::write_block_values(detail::pool_adjacent_violators(ones, total, split_, m), values);
  left_values_ = values.head(split_);
  right_values_ = values.tail(m - split_);

  const Eigen::Index r = m - split_;
  left_terms_ = Eigen::VectorXd::Zero(split_ + 1);
  left_ones_ = CountVector::Zero(split_ + 1);
  left_total_ = CountVector::Zero(split_ + 1);
  for (Eigen::Index j = 0; j < split_; ++j) {
    left_terms_(j + 1) = left_terms_(j) + bernoulli_term(ones(j), total(j), values(j));
    left_ones_(j + 1) = left_ones_(j) + ones(j);
    left_total_(j + 1) = left_total_(j) + total(j);
  }
  right_terms_ = Eigen::VectorXd::Zero(r + 1);
  right_ones_ = CountVector::Zero(r + 1);
  right_total_ = CountVector::Zero(r + 1);
  for (Eigen::Index k = r - 1; k >= 0; --k) {
    const Eigen::Index j = split_ + k;
    right_terms_(k) = right_terms_(k + 1) + bernoulli_term(ones(j), total(j), values(j));
    right_ones_(k) = right_ones_(k + 1) + ones(j);
    right_total_(k) = right_total_(k + 1) + total(j);
  }

  const StepFunction<double> mle = fit_mle(sample);
  unconstrained_ = log_likelihood_at_times(sample, mle.values());
  mle_value_ = mle(t0);
}

double LrProfile::side_log_likelihood(double theta) const {
  // Left values above theta are capped at theta: a suffix of the left part.
  const double* lb = left_values_.data();
  const auto a = std::upper_bound(lb, lb + split_, theta) - lb;
  // Right values below theta are raised to theta: a prefix of the right part.
  const double* rb = right_values_.data();
  const auto r = right_values_.size();
  const auto b = std::lower_bound(rb, rb + r, theta) - rb;

  const std::int64_t ones = (left_ones_(split_) - left_ones_(a)) + (right_ones_(0) - right_ones_(b));
  const std::int64_t total =
      (left_total_(split_) - left_total_(a)) + (right_total_(0) - right_total_(b));
  return left_terms_(a) + right_terms_(b) + bernoulli_term(ones, total, theta);
}

double LrProfile::operator()(double theta) const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidInput("theta0 must lie in [0, 1]");
  // The constrained fit at F^(t0) is the MLE itself; skip the rounding of the split sums.
  if (theta == mle_value_) return 0.0;
  const double constrained = side_log_likelihood(theta);
  if (constrained == -infinity) return infinity;
  return std::max(0.0, 2.0 * (unconstrained_ - constrained));
}

ProbabilityInterval lr_interval(const CurrentStatusSample& sample, double t0, double critical_value,
                                double theta_step, bool refine) {
  if (!(critical_value >= 0.0)) throw InvalidInput("critical value must be nonnegative");
  if (!(theta_step > 0.0 && theta_step <= 0.1)) throw InvalidInput("theta step must lie in (0, 0.1]");
  const LrProfile profile(sample, t0);
  const auto accepted = [&](double theta) { return profile(theta) <= critical_value; };

  // LR vanishes at the MLE value, which therefore always belongs to the set.
  double lower = profile.mle_value();
  double upper = lower;
  // With step = 1/N the grid points are computed as k/N, which keeps them exact decimals.
  const double per_unit = 1.0 / theta_step;
  const bool reciprocal = std::abs(per_unit - std::round(per_unit)) < 1e-9;
  const auto steps = static_cast<std::int64_t>(std::floor((1.0 - 1e-12) / theta_step));
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double theta = reciprocal ? static_cast<double>(k) / std::round(per_unit)
                                    : static_cast<double>(k) * theta_step;
    if (accepted(theta)) {
      lower = std::min(lower, theta);
      upper = std::max(upper, theta);
    }
  }
  if (refine) {
    // LR is continuous in theta, so the boundary lies between the accepted
    // end point and its rejected grid neighbour.
    const double below_lower = std::max(0.0, lower - theta_step);
    const double above_upper = std::min(1.0, upper + theta_step);
    if (below_lower < lower && !accepted(below_lower)) {
      double lo = below_lower, hi = lower;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (accepted(mid) ? hi : lo) = mid;
      }
      lower = hi;
    } else if (below_lower < lower) {
      lower = below_lower;
    }
    if (upper < above_upper && !accepted(above_upper)) {
      double lo = upper, hi = above_upper;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (accepted(mid) ? lo : hi) = mid;
      }
      upper = lo;
    } else if (upper < above_upper) {
      upper = above_upper;
    }
  }
  return {lower, upper};
}

ProbabilityInterval lr_interval(const CurrentStatusSample& sample, double t0,
                                const LrConfig& config) {
  config.validate();
  if (!config.critical_value) throw InvalidInput("critical value not set");
  return lr_interval(sample, t0, *config.critical_value, config.theta_step, config.refine);
}

double calibrate_critical_value(const LrConfig& config) {
  config.validate();
  const LrCalibration& cal = config.calibration;
  std::vector<double> values(static_cast<std::size_t>(cal.replicates));
  parallel_for(values.size(), config.threads, [&](std::size_t r) {
    RandomStream rng(cal.seed, r);
    const auto n = static_cast<std::size_t>(cal.sample_size);
    std::vector<double> times(n);
    std::vector<int> indicators(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double event = rng.uniform(0.0, 2.0);
      times[i] = rng.uniform(0.0, 2.0);
      indicators[i] = event <= times[i] ? 1 : 0;
    }
    const auto sample = CurrentStatusSample::from_observations(times, indicators, 2.0);
    values[r] = lr_statistic(sample, 1.0, 0.5);
  });
  std::sort(values.begin(), values.end());
  const double b = static_cast<double>(values.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - config.alpha) * b - 1e-9));
  k = std::clamp<std::size_t>(k, 1, values.size());
  return values[k - 1];
}

ConfidenceBand ci_banerjee_wellner(const CurrentStatusSample& sample, const Eigen::VectorXd& grid,
                                   const LrConfig& config) {
  config.validate();
  if (grid.size() == 0) throw InvalidInput("evaluation grid is empty");
  for (Eigen::Index i = 0; i < grid.size(); ++i) check_t0(sample, grid(i));
  const double d = config.critical_value ? *config.critical_value : calibrate_critical_value(config);

  ConfidenceBand out;
  out.grid = grid;
  out.estimate.resize(grid.size());
  out.lower.resize(grid.size());
  out.upper.resize(grid.size());
  out.level = 1.0 - config.alpha;
  out.method = Method::banerjee_wellner;
  out.fallback.assign(static_cast<std::size_t>(grid.size()), 0);
  const StepFunction<double> mle = fit_mle(sample);
  parallel_for(static_cast<std::size_t>(grid.size()), config.threads, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    const ProbabilityInterval interval =
        lr_interval(sample, grid(row), d, config.theta_step, config.refine);
    out.estimate(row) = mle(grid(row));
    out.lower(row) = interval.lower;
    out.upper(row) = interval.upper;
  });
  return out;
}

}  // namespace curstat
