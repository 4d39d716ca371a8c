#pragma once

#include "curstat/bandwidth_spec.hpp"
#include "curstat/kernel.hpp"
#include "curstat/step_function.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace curstat {

/// Smoothed maximum likelihood estimator: the jumps of an MLE smoothed with
/// the integrated kernel,
///   F~(t) = sum_x dF^(x) IK_h(t - x),
/// or with the reflected weight IK_h(t-x) + IK_h(t+x) - IK_h(2M-t-x) when
/// boundary corrected. h = h(t) comes from the bandwidth rule at the target
/// point and the sample size.
class SmoothEstimate {
 public:
  SmoothEstimate(StepFunction<double> source, Kernel kernel, BandwidthSpec bandwidth, double upper,
                 std::int64_t sample_size, bool boundary_corrected = true);

  const StepFunction<double>& source() const noexcept { return source_; }
  const Jumps& jumps() const noexcept { return jumps_; }
  Kernel kernel() const noexcept { return kernel_; }
  const BandwidthSpec& bandwidth() const noexcept { return bandwidth_; }
  double upper() const noexcept { return upper_; }
  std::int64_t sample_size() const noexcept { return sample_size_; }
  bool boundary_corrected() const noexcept { return boundary_corrected_; }

  /// h(t); throws InvalidInput if it is not positive.
  double bandwidth_at(double t) const;

 private:
  StepFunction<double> source_;
  Jumps jumps_;
  Kernel kernel_;
  BandwidthSpec bandwidth_;
  double upper_;
  std::int64_t sample_size_;
  bool boundary_corrected_;
};

/// F~(t) for t in [0, M].
double smle_eval(const SmoothEstimate& estimate, double t);

/// int IK_h(t - u) dF~(u) in closed form through the convolution kernel:
/// sum_x dF^(x) K~_h(t - x), or with the reflected K~ weight when boundary
/// corrected (then 0 < h <= M/3 is required).
double integrated_smle_eval(const SmoothEstimate& estimate, double t);

/// smle_eval over a grid.
Eigen::VectorXd smle_curve(const SmoothEstimate& estimate, const Eigen::VectorXd& grid);

/// Smoothed value at t for an explicit bandwidth h (no rule lookup).
double smooth_jumps(const Jumps& jumps, Kernel kernel, double t, double h, double upper,
                    bool boundary_corrected);

}  // namespace curstat
