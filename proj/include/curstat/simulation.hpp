#pragma once

#include "curstat/band.hpp"
#include "curstat/bandwidth_spec.hpp"
#include "curstat/bootstrap.hpp"
#include "curstat/kernel.hpp"
#include "curstat/likelihood_ratio.hpp"
#include "curstat/rng.hpp"
#include "curstat/sample.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace curstat {

enum class Truth { uniform02, trunc_exp02 };

/// Event times from `truth` on [0, 2], inspection times Uniform(0, 2).
struct ModelSpec {
  Truth truth = Truth::uniform02;

  static constexpr double upper = 2.0;

  /// F0(t): t/2, or (1 - e^-t)/(1 - e^-2) for the unit-rate truncated exponential.
  double cdf(double t) const;
  double quantile(double u) const;
};

/// "uniform" or "truncexp".
std::string_view to_string(Truth truth);
Truth parse_truth(std::string_view name);

CurrentStatusSample draw_sample(const ModelSpec& model, std::int64_t n, RandomStream& rng);

/// Band construction used inside a coverage study; receives the simulated
/// sample and a seed for its own randomness.
using BandMethod = std::function<ConfidenceBand(const CurrentStatusSample&, std::uint64_t)>;

struct CoverageConfig {
  ModelSpec model;
  std::int64_t n = 500;
  Eigen::VectorXd grid;
  int simulations = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
};

/// Per grid point: how often F0(t) fell outside the band and the mean band length.
struct ExperimentResult {
  std::string model;
  std::string method;
  std::string kernel;
  std::string bandwidth;
  std::int64_t n = 0;
  int simulations = 0;
  int replicates = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  Eigen::VectorXd grid;
  std::vector<std::int64_t> misses;
  Eigen::VectorXd mean_length;
  /// Not part of the persisted result, so that output files are reproducible.
  double wall_seconds = 0.0;

  Eigen::VectorXd noncoverage() const;

  friend bool operator==(const ExperimentResult& a, const ExperimentResult& b) {
    return a.model == b.model && a.method == b.method && a.kernel == b.kernel &&
           a.bandwidth == b.bandwidth && a.n == b.n && a.simulations == b.simulations &&
           a.replicates == b.replicates && a.alpha == b.alpha && a.seed == b.seed &&
           a.grid == b.grid && a.misses == b.misses && a.mean_length == b.mean_length;
  }
};

/// Runs `method` on config.simulations simulated samples. Metadata fields
/// other than model, n, simulations and seed are left for the caller.
ExperimentResult run_coverage(const CoverageConfig& config, const BandMethod& method);

/// Everything needed to build one of the four bands.
struct MethodSettings {
  Method method = Method::smle_studentized;
  Kernel kernel = Kernel::triweight;
  BandwidthSpec bandwidth = BandwidthSpec::fixed(2.0);
  BootstrapConfig bootstrap;
  LrConfig lr;
};

/// Band of any method; the bootstrap seed is replaced by `seed`.
ConfidenceBand compute_band(const CurrentStatusSample& sample, const Eigen::VectorXd& grid,
                            const MethodSettings& settings, std::uint64_t seed);

/// Coverage study of a built-in method with metadata filled in. A missing LR
/// critical value is calibrated once up front.
ExperimentResult run_coverage(const CoverageConfig& config, MethodSettings settings);

/// Smoothed estimate at t from a sample and a bandwidth h.
using SmoothEstimator = std::function<double(const CurrentStatusSample&, double t, double h)>;

/// The boundary-corrected SMLE.
double default_smooth_estimator(const CurrentStatusSample& sample, double t, double h,
                                Kernel kernel);

/// Monte Carlo MSE of the estimate at bandwidth c n^-1/5 against F0(t), per c.
Eigen::VectorXd monte_carlo_mse(const ModelSpec& model, std::int64_t n, double t,
                                const std::vector<double>& c_grid, int simulations,
                                std::uint64_t seed, const SmoothEstimator& estimator,
                                unsigned threads = 1);

struct RateRow {
  std::int64_t n = 0;
  double rmse_mle = 0.0;
  double rmse_smle = 0.0;
};

/// Monte Carlo RMSE at t of the MLE and of the boundary-corrected SMLE with
/// bandwidth c n^-1/5.
std::vector<RateRow> rate_check(const ModelSpec& model, const std::vector<std::int64_t>& n_list,
                                double t, int simulations, std::uint64_t seed,
                                Kernel kernel = Kernel::triweight, double c = 2.0,
                                unsigned threads = 1);

}  // namespace curstat
