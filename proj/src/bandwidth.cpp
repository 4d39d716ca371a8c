#include "curstat/bandwidth.hpp"

#include "curstat/errors.hpp"
#include "curstat/isotonic.hpp"
#include "curstat/parallel.hpp"
#include "curstat/smle.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace curstat {

namespace {

double default_scale(const CurrentStatusSample& sample) {
  return sample.upper() * std::pow(static_cast<double>(sample.size()), -0.2);
}

double reflect_into(double x, double upper) {
  while (x < 0.0 || x > upper) x = x < 0.0 ? -x : 2.0 * upper - x;
  return x;
}

}  // namespace

std::vector<double> BandwidthSearchConfig::default_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 100; ++k) grid.push_back(0.05 * k);
  return grid;
}

BandwidthSpec BandwidthSearchConfig::pilot_for(const CurrentStatusSample& sample) const {
  return pilot ? *pilot : BandwidthSpec::fixed(sample.upper(), 0.2);
}

double BandwidthSearchConfig::g_for(const CurrentStatusSample& sample) const {
  return g_bandwidth ? *g_bandwidth : default_scale(sample);
}

void BandwidthSearchConfig::validate(const CurrentStatusSample& sample) const {
  if (sample.empty()) throw InvalidInput("bandwidth search needs a nonempty sample");
  if (subsample < 1 || subsample > sample.size()) {
    throw InvalidInput("subsample size m must satisfy 1 <= m <= n");
  }
  if (replicates < 1) throw InvalidInput("bandwidth search needs at least one replicate");
  if (c_grid.empty()) throw InvalidInput("candidate grid is empty");
  for (std::size_t k = 0; k < c_grid.size(); ++k) {
    if (!(c_grid[k] > 0.0) || (k > 0 && !(c_grid[k] > c_grid[k - 1]))) {
      throw InvalidInput("candidate grid must be positive and increasing");
    }
  }
  const double largest = c_grid.back() * std::pow(static_cast<double>(subsample), -0.2);
  if (largest > sample.upper()) {
    throw InvalidInput("largest candidate bandwidth c m^-1/5 exceeds M");
  }
  if (g_bandwidth && !(*g_bandwidth >= 0.0)) throw InvalidInput("g bandwidth must be nonnegative");
  if (!(under_exponent > 0.0)) throw InvalidInput("undersmoothing exponent must be positive");
  pilot_for(sample).validate(sample.upper(), sample.size());
}

Eigen::VectorXd sample_censoring_times(const CurrentStatusSample& sample, std::int64_t m, double g,
                                       Kernel kernel, RandomStream& rng) {
  if (m < 1) throw InvalidInput("need at least one censoring time");
  if (sample.empty()) throw InvalidInput("cannot resample an empty sample");
  if (!(g >= 0.0)) throw InvalidInput("g bandwidth must be nonnegative");
  const CountVector& weights = sample.weights();
  CountVector cumulative(weights.size());
  std::int64_t running = 0;
  for (Eigen::Index j = 0; j < weights.size(); ++j) cumulative(j) = running += weights(j);
  const double upper = sample.upper();

  Eigen::VectorXd out(m);
  for (std::int64_t i = 0; i < m; ++i) {
    double x = 0.0;
    do {
      const auto u = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(running)));
      const std::int64_t* begin = cumulative.data();
      const auto j = std::upper_bound(begin, begin + cumulative.size(), u) - begin;
      x = sample.times()(j);
      if (g > 0.0) x = reflect_into(x + g * draw(kernel, rng), upper);
    } while (!(x > 0.0));
    out(i) = x;
  }
  return out;
}

Eigen::VectorXd subsample_squared_errors(const Eigen::VectorXd& times,
                                         const std::vector<int>& indicators, double upper, double t,
                                         const std::vector<double>& c_grid, Kernel kernel,
                                         double target) {
  const auto sub = CurrentStatusSample::from_observations(
      std::span<const double>(times.data(), static_cast<std::size_t>(times.size())), indicators,
      upper);
  const Jumps jumps = jumps_of(fit_mle(sub));
  const double shrink = std::pow(static_cast<double>(times.size()), -0.2);
  Eigen::VectorXd out(static_cast<Eigen::Index>(c_grid.size()));
  for (std::size_t k = 0; k < c_grid.size(); ++k) {
    const double diff = smooth_jumps(jumps, kernel, t, c_grid[k] * shrink, upper, true) - target;
    out(static_cast<Eigen::Index>(k)) = diff * diff;
  }
  return out;
}

Eigen::VectorXd bootstrap_mse_curve(const CurrentStatusSample& sample, double t,
                                    const BandwidthSearchConfig& config) {
  config.validate(sample);
  const double upper = sample.upper();
  if (!(t >= 0.0 && t <= upper)) throw InvalidInput("target point must lie in [0, M]");
  const SmoothEstimate pilot(fit_mle(sample), config.kernel, config.pilot_for(sample), upper,
                             sample.size(), true);
  const double target = smle_eval(pilot, t);
  const double g = config.g_for(sample);

  const auto b = static_cast<Eigen::Index>(config.replicates);
  const auto c = static_cast<Eigen::Index>(config.c_grid.size());
  Eigen::MatrixXd errors(b, c);
  parallel_for(static_cast<std::size_t>(b), config.threads, [&](std::size_t r) {
    RandomStream rng(config.seed, r);
    const Eigen::VectorXd times =
        config.censoring_sampler
            ? config.censoring_sampler(rng)
            : sample_censoring_times(sample, config.subsample, g, config.kernel, rng);
    std::vector<int> indicators(static_cast<std::size_t>(times.size()));
    for (Eigen::Index i = 0; i < times.size(); ++i) {
      const double p = std::clamp(smle_eval(pilot, times(i)), 0.0, 1.0);
      indicators[static_cast<std::size_t>(i)] = rng.bernoulli(p) ? 1 : 0;
    }
    errors.row(static_cast<Eigen::Index>(r)) =
        subsample_squared_errors(times, indicators, upper, t, config.c_grid, config.kernel, target)
            .transpose();
  });
  return errors.colwise().mean().transpose();
}

double bootstrap_mse(const CurrentStatusSample& sample, double t, double c,
                     const BandwidthSearchConfig& config) {
  BandwidthSearchConfig single = config;
  single.c_grid = {c};
  return bootstrap_mse_curve(sample, t, single)(0);
}

LocalBandwidth choose_bandwidth(const std::vector<double>& c_grid, const Eigen::VectorXd& mse,
                                std::int64_t n, double under_exponent) {
  if (c_grid.empty() || static_cast<Eigen::Index>(c_grid.size()) != mse.size()) {
    throw InvalidInput("one MSE value per candidate expected");
  }
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < mse.size(); ++k) {
    if (mse(k) < mse(best)) best = k;
  }
  LocalBandwidth out;
  out.c_opt = c_grid[static_cast<std::size_t>(best)];
  out.h_opt = out.c_opt * std::pow(static_cast<double>(n), -under_exponent);
  out.mse = mse;
  return out;
}

LocalBandwidth select_local_bandwidth(const CurrentStatusSample& sample, double t,
                                      const BandwidthSearchConfig& config) {
  LocalBandwidth out = choose_bandwidth(config.c_grid, bootstrap_mse_curve(sample, t, config),
                                        sample.size(), config.under_exponent);
  out.t = t;
  return out;
}

AffineFit fit_affine_bandwidth(const Eigen::VectorXd& t, const Eigen::VectorXd& h) {
  if (t.size() != h.size()) throw InvalidInput("one bandwidth per time point expected");
  if (t.size() < 2 || t.maxCoeff() == t.minCoeff()) {
    throw InvalidInput("affine fit needs at least two distinct time points");
  }
  Eigen::MatrixXd design(t.size(), 2);
  design.col(0).setOnes();
  design.col(1) = t;
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(h);
  return {coef(0), coef(1)};
}

}  // namespace curstat
