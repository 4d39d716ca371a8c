#pragma once

// Likelihood-ratio intervals for F(t0): the set of theta with
//   LR(theta) = 2 (log L(F^) - log L(F^theta)) <= d,
// F^theta the MLE constrained to F(t0) = theta and d the (1 - alpha) quantile
// of the parameter-free limit of LR, taken from the user or calibrated by
// simulation.

#include "curstat/band.hpp"
#include "curstat/sample.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>

namespace curstat {

struct LrCalibration {
  std::int64_t sample_size = 5000;
  int replicates = 5000;
  std::uint64_t seed = 20231;
};

struct LrConfig {
  /// d_{1-alpha}; calibrated from `calibration` when absent.
  std::optional<double> critical_value;
  double theta_step = 0.001;
  /// Bisect each end point between the last rejected and first accepted grid value.
  bool refine = false;
  double alpha = 0.05;
  LrCalibration calibration;
  unsigned threads = 1;

  void validate() const;
};

/// LR(theta0) at t0 in (0, M]; +inf when the constraint makes the data impossible.
double lr_statistic(const CurrentStatusSample& sample, double t0, double theta0);

/// LR(theta) at a fixed t0 for many theta: the two PAVA fits are computed once
/// and each evaluation costs O(log m).
class LrProfile {
 public:
  LrProfile(const CurrentStatusSample& sample, double t0);

  double operator()(double theta) const;
  /// F^(t0), where LR vanishes.
  double mle_value() const noexcept { return mle_value_; }

 private:
  double side_log_likelihood(double theta) const;

  Eigen::Index split_ = 0;
  Eigen::VectorXd left_values_;   // nondecreasing, times <= t0
  Eigen::VectorXd right_values_;  // nondecreasing, times > t0
  // Prefix sums over the left part and suffix sums over the right part of the
  // unconstrained per-time log-likelihood terms and of the counts.
  Eigen::VectorXd left_terms_, right_terms_;
  CountVector left_ones_, left_total_, right_ones_, right_total_;
  double unconstrained_ = 0.0;
  double mle_value_ = 0.0;
};

struct ProbabilityInterval {
  double lower = 0.0;
  double upper = 1.0;
};

/// [min, max] of the accepted theta in {step, 2 step, ..., < 1} together with F^(t0).
ProbabilityInterval lr_interval(const CurrentStatusSample& sample, double t0, double critical_value,
                                double theta_step = 0.001, bool refine = false);
/// Uses config.critical_value, which must be set.
ProbabilityInterval lr_interval(const CurrentStatusSample& sample, double t0,
                                const LrConfig& config);

/// (1 - alpha) quantile of LR(F0(1)) over simulated uniform(0,2) samples with
/// uniform(0,2) inspection times.
double calibrate_critical_value(const LrConfig& config);

/// Pointwise LR band; the estimate is the MLE and every grid point must lie in (0, M].
ConfidenceBand ci_banerjee_wellner(const CurrentStatusSample& sample, const Eigen::VectorXd& grid,
                                   const LrConfig& config);

}  // namespace curstat
