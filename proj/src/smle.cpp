#include "curstat/smle.hpp"

#include "curstat/errors.hpp"

#include <cmath>
#include <utility>

namespace curstat {

namespace {

void check_point(double t, double upper) {
  if (!(t >= 0.0 && t <= upper)) throw InvalidInput("evaluation point must lie in [0, M]");
}

}  // namespace

SmoothEstimate::SmoothEstimate(StepFunction<double> source, Kernel kernel, BandwidthSpec bandwidth,
                               double upper, std::int64_t sample_size, bool boundary_corrected)
    : source_(std::move(source)),
      jumps_(jumps_of(source_)),
      kernel_(kernel),
      bandwidth_(std::move(bandwidth)),
      upper_(upper),
      sample_size_(sample_size),
      boundary_corrected_(boundary_corrected) {
  if (!(upper_ > 0.0)) throw InvalidInput("upper bound M must be positive");
  if (sample_size_ <= 0) throw InvalidInput("sample size must be positive");
}

double SmoothEstimate::bandwidth_at(double t) const {
  const double h = bandwidth_.at(t, sample_size_);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InvalidInput("bandwidth must be positive at t = " + std::to_string(t));
  }
  return h;
}

double smooth_jumps(const Jumps& jumps, Kernel kernel, double t, double h, double upper,
                    bool boundary_corrected) {
  check_point(t, upper);
  if (!(h > 0.0)) throw InvalidInput("bandwidth must be positive");
  if (boundary_corrected && h > upper) throw InvalidInput("boundary correction needs 0 < h <= M");
  double total = 0.0;
  for (Eigen::Index k = 0; k < jumps.locations.size(); ++k) {
    const double x = jumps.locations(k);
    const double weight = boundary_corrected ? detail::reflected_integrated(kernel, t, x, h, upper)
                                             : scaled_integrated(kernel, t - x, h);
    total += jumps.masses(k) * weight;
  }
  return total;
}

double smle_eval(const SmoothEstimate& estimate, double t) {
  check_point(t, estimate.upper());
  return smooth_jumps(estimate.jumps(), estimate.kernel(), t, estimate.bandwidth_at(t),
                      estimate.upper(), estimate.boundary_corrected());
}

double integrated_smle_eval(const SmoothEstimate& estimate, double t) {
  check_point(t, estimate.upper());
  const double h = estimate.bandwidth_at(t);
  const double upper = estimate.upper();
  if (estimate.boundary_corrected() && h > upper / 3.0) {
    throw InvalidInput("boundary-corrected integrated estimator needs 0 < h <= M/3 (h = " +
                       std::to_string(h) + ", M/3 = " + std::to_string(upper / 3.0) + ")");
  }
  const Jumps& jumps = estimate.jumps();
  double total = 0.0;
  for (Eigen::Index k = 0; k < jumps.locations.size(); ++k) {
    const double x = jumps.locations(k);
    const double weight = estimate.boundary_corrected()
                              ? detail::reflected_convolution(estimate.kernel(), t, x, h, upper)
                              : scaled_convolution(estimate.kernel(), t - x, h);
    total += jumps.masses(k) * weight;
  }
  return total;
}

Eigen::VectorXd smle_curve(const SmoothEstimate& estimate, const Eigen::VectorXd& grid) {
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out(i) = smle_eval(estimate, grid(i));
  return out;
}

}  // namespace curstat
