#include "curstat/bootstrap.hpp"

#include "curstat/errors.hpp"
#include "curstat/isotonic.hpp"
#include "curstat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace curstat {

namespace {

bool is_bootstrap_method(Method method) {
  return method == Method::smle_classical || method == Method::smle_studentized ||
         method == Method::sen_xu;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double variance_from_values(const Eigen::VectorXd& times, const CountVector& weights,
                            const CountVector& positives, const Eigen::VectorXd& fitted,
                            std::int64_t n, Kernel kernel, double h, double t) {
  const double* begin = times.data();
  const double* end = begin + times.size();
  const auto first = std::upper_bound(begin, end, t - h) - begin;
  const auto last = std::lower_bound(first + begin, end, t + h) - begin;
  double total = 0.0;
  for (Eigen::Index j = first; j < last; ++j) {
    const double k = scaled_density(kernel, t - times(j), h);
    if (k == 0.0) continue;
    const double p = fitted(j);
    const double ones = static_cast<double>(positives(j));
    const double zeros = static_cast<double>(weights(j) - positives(j));
    total += k * k * (ones * (1.0 - p) * (1.0 - p) + zeros * p * p);
  }
  const double nn = static_cast<double>(n);
  return total / (nn * nn);
}

}  // namespace

void BootstrapConfig::validate() const {
  if (replicates < 2) throw InvalidInput("bootstrap needs B >= 2 replicates");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
}

CountVector resample_indicators(const CountVector& weights, const Eigen::VectorXd& probabilities,
                                RandomStream& rng) {
  if (weights.size() != probabilities.size()) {
    throw InvalidInput("one probability per inspection time expected");
  }
  CountVector out(weights.size());
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    const double p = probabilities(j);
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("resampling probabilities must lie in [0, 1]");
    out(j) = rng.binomial(weights(j), p);
  }
  return out;
}

double variance_estimate(const CurrentStatusSample& sample, const StepFunction<double>& fit,
                         Kernel kernel, double h, double t) {
  if (!(h > 0.0)) throw InvalidInput("bandwidth must be positive");
  Eigen::VectorXd fitted(sample.distinct());
  for (Eigen::Index j = 0; j < fitted.size(); ++j) fitted(j) = fit(sample.times()(j));
  return variance_from_values(sample.times(), sample.weights(), sample.positives(), fitted,
                              sample.size(), kernel, h, t);
}

double order_statistic(const std::vector<double>& sorted, double alpha) {
  if (sorted.empty()) throw InvalidInput("no replicate values");
  const double b = static_cast<double>(sorted.size());
  // The small slack keeps alpha * B exact when it is an integer up to rounding.
  auto k = static_cast<std::ptrdiff_t>(std::ceil(alpha * b - 1e-9));
  k = std::clamp<std::ptrdiff_t>(k, 1, static_cast<std::ptrdiff_t>(sorted.size()));
  return sorted[static_cast<std::size_t>(k - 1)];
}

SmoothBootstrap::SmoothBootstrap(const CurrentStatusSample& sample, Kernel kernel,
                                 BandwidthSpec bandwidth, Eigen::VectorXd grid, Method method)
    : sample_(sample),
      kernel_(kernel),
      bandwidth_(std::move(bandwidth)),
      grid_(std::move(grid)),
      method_(method) {
  if (!is_bootstrap_method(method_)) throw InvalidInput("not a bootstrap method");
  if (sample_.empty()) throw InvalidInput("cannot bootstrap an empty sample");
  if (grid_.size() == 0) throw InvalidInput("evaluation grid is empty");
  const double upper = sample_.upper();
  const std::int64_t n = sample_.size();
  bandwidth_.validate(upper, n);

  const StepFunction<double> mle = fit_mle(sample_);
  const SmoothEstimate smooth(mle, kernel_, bandwidth_, upper, n, true);

  probabilities_.resize(sample_.distinct());
  for (Eigen::Index j = 0; j < probabilities_.size(); ++j) {
    probabilities_(j) = clamp01(smle_eval(smooth, sample_.times()(j)));
  }

  const Eigen::Index g = grid_.size();
  bandwidths_.resize(g);
  center_.resize(g);
  offset_.resize(g);
  if (method_ == Method::smle_studentized) variance_.resize(g);
  for (Eigen::Index i = 0; i < g; ++i) {
    const double t = grid_(i);
    bandwidths_(i) = smooth.bandwidth_at(t);
    const double smoothed = clamp01(smle_eval(smooth, t));
    if (method_ == Method::sen_xu) {
      center_(i) = mle(t);
      offset_(i) = smoothed;
    } else {
      center_(i) = smoothed;
      offset_(i) = integrated_smle_eval(smooth, t);
    }
    if (method_ == Method::smle_studentized) {
      variance_(i) = variance_estimate(sample_, mle, kernel_, bandwidths_(i), t);
    }
  }
}

SmoothBootstrap::Replicate SmoothBootstrap::replicate(const CountVector& positives) const {
  const CurrentStatusSample resampled = sample_.with_positives(positives);
  const StepFunction<double> mle = fit_mle(resampled);
  const Eigen::Index g = grid_.size();
  Replicate out{Eigen::VectorXd(g), Eigen::VectorXd()};
  if (method_ == Method::sen_xu) {
    for (Eigen::Index i = 0; i < g; ++i) out.root(i) = mle(grid_(i)) - offset_(i);
    return out;
  }
  const Jumps jumps = jumps_of(mle);
  const double upper = sample_.upper();
  for (Eigen::Index i = 0; i < g; ++i) {
    out.root(i) = smooth_jumps(jumps, kernel_, grid_(i), bandwidths_(i), upper, true) - offset_(i);
  }
  if (method_ == Method::smle_studentized) {
    out.variance.resize(g);
    for (Eigen::Index i = 0; i < g; ++i) {
      out.variance(i) =
          variance_from_values(resampled.times(), resampled.weights(), resampled.positives(),
                               mle.values(), resampled.size(), kernel_, bandwidths_(i), grid_(i));
    }
  }
  return out;
}

SmoothBootstrap::Replicate SmoothBootstrap::replicate(std::uint64_t seed,
                                                      std::uint64_t index) const {
  RandomStream rng(seed, index);
  return replicate(resample_indicators(sample_.weights(), probabilities_, rng));
}

ConfidenceBand SmoothBootstrap::band(const Eigen::MatrixXd& roots,
                                     const Eigen::MatrixXd& variances, double alpha) const {
  const Eigen::Index g = grid_.size();
  const Eigen::Index b = roots.rows();
  if (roots.cols() != g || b < 1) throw InvalidInput("replicate matrix does not match the grid");
  const bool studentized = method_ == Method::smle_studentized;
  if (studentized && (variances.rows() != b || variances.cols() != g)) {
    throw InvalidInput("Studentized band needs one variance per replicate and grid point");
  }

  ConfidenceBand out;
  out.grid = grid_;
  out.estimate = center_;
  out.lower.resize(g);
  out.upper.resize(g);
  out.level = 1.0 - alpha;
  out.method = method_;
  out.fallback.assign(static_cast<std::size_t>(g), 0);

  std::vector<double> values(static_cast<std::size_t>(b));
  for (Eigen::Index i = 0; i < g; ++i) {
    bool use_pivot = studentized && variance_(i) > 0.0;
    if (use_pivot) {
      for (Eigen::Index r = 0; r < b; ++r) {
        if (!(variances(r, i) > 0.0)) {
          use_pivot = false;
          break;
        }
      }
    }
    double scale = 1.0;
    if (use_pivot) {
      for (Eigen::Index r = 0; r < b; ++r) {
        values[static_cast<std::size_t>(r)] = roots(r, i) / std::sqrt(variances(r, i));
      }
      scale = std::sqrt(variance_(i));
    } else {
      for (Eigen::Index r = 0; r < b; ++r) values[static_cast<std::size_t>(r)] = roots(r, i);
      if (studentized) out.fallback[static_cast<std::size_t>(i)] = 1;
    }
    std::sort(values.begin(), values.end());
    const double low_quantile = order_statistic(values, alpha / 2.0);
    const double high_quantile = order_statistic(values, 1.0 - alpha / 2.0);
    out.lower(i) = clamp01(center_(i) - high_quantile * scale);
    out.upper(i) = clamp01(center_(i) - low_quantile * scale);
  }
  return out;
}

ConfidenceBand run_bootstrap(const SmoothBootstrap& engine, const BootstrapConfig& config) {
  config.validate();
  const Eigen::Index b = config.replicates;
  const Eigen::Index g = engine.grid().size();
  const bool studentized = engine.method() == Method::smle_studentized;
  Eigen::MatrixXd roots(b, g);
  Eigen::MatrixXd variances(studentized ? b : 0, g);
  parallel_for(static_cast<std::size_t>(b), config.threads, [&](std::size_t r) {
    const auto row = static_cast<Eigen::Index>(r);
    SmoothBootstrap::Replicate rep = engine.replicate(config.seed, r);
    roots.row(row) = rep.root.transpose();
    if (studentized) variances.row(row) = rep.variance.transpose();
  });
  return engine.band(roots, variances, config.alpha);
}

namespace {

ConfidenceBand run_method(const CurrentStatusSample& sample, Kernel kernel,
                          const BandwidthSpec& bandwidth, const Eigen::VectorXd& grid,
                          const BootstrapConfig& config, Method method) {
  config.validate();
  return run_bootstrap(SmoothBootstrap(sample, kernel, bandwidth, grid, method), config);
}

}  // namespace

ConfidenceBand ci_smle_classical(const CurrentStatusSample& sample, Kernel kernel,
                                 const BandwidthSpec& bandwidth, const Eigen::VectorXd& grid,
                                 const BootstrapConfig& config) {
  return run_method(sample, kernel, bandwidth, grid, config, Method::smle_classical);
}

ConfidenceBand ci_smle_studentized(const CurrentStatusSample& sample, Kernel kernel,
                                   const BandwidthSpec& bandwidth, const Eigen::VectorXd& grid,
                                   const BootstrapConfig& config) {
  return run_method(sample, kernel, bandwidth, grid, config, Method::smle_studentized);
}

ConfidenceBand ci_sen_xu(const CurrentStatusSample& sample, Kernel kernel,
                         const BandwidthSpec& bandwidth, const Eigen::VectorXd& grid,
                         const BootstrapConfig& config) {
  return run_method(sample, kernel, bandwidth, grid, config, Method::sen_xu);
}

}  // namespace curstat
