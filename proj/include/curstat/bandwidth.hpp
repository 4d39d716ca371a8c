#pragma once

// Local bandwidth selection by a subsampling bootstrap. For a target point t
// and each candidate c, B subsamples of size m are drawn: censoring times from
// a smoothed version of the observed ones, indicators from the pilot SMLE
// F~_{n,h0}. The bootstrap MSE of c is the mean squared distance between the
// subsample SMLE at bandwidth c m^-1/5 and the pilot value at t; the chosen
// bandwidth is c_opt n^-1/4 (undersmoothed).
//
// All candidates share the same subsamples (common random numbers), so one
// subsample MLE serves the whole candidate grid.

#include "curstat/bandwidth_spec.hpp"
#include "curstat/kernel.hpp"
#include "curstat/rng.hpp"
#include "curstat/sample.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace curstat {

/// Draws the censoring times of one subsample.
using CensoringSampler = std::function<Eigen::VectorXd(RandomStream&)>;

struct BandwidthSearchConfig {
  std::vector<double> c_grid = default_grid();
  std::int64_t subsample = 100;
  int replicates = 500;
  /// Pilot rule h0; M n^-1/5 when absent.
  std::optional<BandwidthSpec> pilot;
  double under_exponent = 0.25;
  /// Smoothing of the censoring-time resampling; M n^-1/5 when absent.
  std::optional<double> g_bandwidth;
  Kernel kernel = Kernel::triweight;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  /// Replaces sample_censoring_times when set.
  CensoringSampler censoring_sampler;

  /// 0.05, 0.10, ..., 5.
  static std::vector<double> default_grid();
  void validate(const CurrentStatusSample& sample) const;
  BandwidthSpec pilot_for(const CurrentStatusSample& sample) const;
  double g_for(const CurrentStatusSample& sample) const;
};

/// m draws T_J + g eps, J weight-proportional over the observations and eps
/// from the kernel density, reflected into (0, M].
Eigen::VectorXd sample_censoring_times(const CurrentStatusSample& sample, std::int64_t m, double g,
                                       Kernel kernel, RandomStream& rng);

/// Squared distances (F~_sub(t) - target)^2 for every candidate, F~_sub the
/// boundary-corrected SMLE of one subsample at bandwidth c m^-1/5.
Eigen::VectorXd subsample_squared_errors(const Eigen::VectorXd& times,
                                         const std::vector<int>& indicators, double upper, double t,
                                         const std::vector<double>& c_grid, Kernel kernel,
                                         double target);

/// Bootstrap MSE for every candidate in config.c_grid.
Eigen::VectorXd bootstrap_mse_curve(const CurrentStatusSample& sample, double t,
                                    const BandwidthSearchConfig& config);

/// Bootstrap MSE of a single candidate c.
double bootstrap_mse(const CurrentStatusSample& sample, double t, double c,
                     const BandwidthSearchConfig& config);

struct LocalBandwidth {
  double t = 0.0;
  double c_opt = 0.0;
  double h_opt = 0.0;
  Eigen::VectorXd mse;
};

/// Argmin of `mse` over `c_grid`, ties to the smallest c; h = c n^-exponent.
LocalBandwidth choose_bandwidth(const std::vector<double>& c_grid, const Eigen::VectorXd& mse,
                                std::int64_t n, double under_exponent);

LocalBandwidth select_local_bandwidth(const CurrentStatusSample& sample, double t,
                                      const BandwidthSearchConfig& config);

struct AffineFit {
  double a = 0.0;
  double b = 0.0;
};

/// Least-squares line h = a + b t; needs two distinct t.
AffineFit fit_affine_bandwidth(const Eigen::VectorXd& t, const Eigen::VectorXd& h);

}  // namespace curstat
