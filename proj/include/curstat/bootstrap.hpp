#pragma once

// Smooth bootstrap for current status data: inspection times stay fixed and
// indicators are redrawn from Bernoulli(F~(T_i)), F~ the boundary-corrected
// smoothed MLE of the original sample. Three interval constructions share the
// engine:
//
//   smle-classical    [F~(t) - U_{1-a/2}, F~(t) - U_{a/2}],
//                     U quantiles of  F~*(t) - int IK_h(t-u) dF~(u)
//   smle-studentized  [F~(t) - Q_{1-a/2} sqrt(S(t)), F~(t) - Q_{a/2} sqrt(S(t))],
//                     Q quantiles of the root above divided by sqrt(S*(t))
//   sen-xu            [F^(t) - V_{1-a/2}, F^(t) - V_{a/2}],
//                     V quantiles of  F^*(t) - F~(t)
//
// with S(t) = n^-2 sum_i K_h(t - T_i)^2 (Delta_i - F^(T_i))^2. Quantiles are
// the ceil(a B)-th order statistic; endpoints are clamped to [0, 1].

#include "curstat/band.hpp"
#include "curstat/bandwidth_spec.hpp"
#include "curstat/kernel.hpp"
#include "curstat/rng.hpp"
#include "curstat/sample.hpp"
#include "curstat/smle.hpp"
#include "curstat/step_function.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace curstat {

struct BootstrapConfig {
  int replicates = 1000;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  unsigned threads = 1;

  void validate() const;
};

/// Binomial(w_j, p_j) positives per distinct time (Bernoulli for untied data).
CountVector resample_indicators(const CountVector& weights, const Eigen::VectorXd& probabilities,
                                RandomStream& rng);

/// n^-2 sum_i K_h(t - T_i)^2 (Delta_i - F(T_i))^2 with the sample's own indicators.
double variance_estimate(const CurrentStatusSample& sample, const StepFunction<double>& fit,
                         Kernel kernel, double h, double t);

/// ceil(alpha * B)-th smallest of B sorted values.
double order_statistic(const std::vector<double>& sorted, double alpha);

/// Everything about the original sample that the replicates of one method need.
class SmoothBootstrap {
 public:
  /// `method` must be one of the three bootstrap methods.
  SmoothBootstrap(const CurrentStatusSample& sample, Kernel kernel, BandwidthSpec bandwidth,
                  Eigen::VectorXd grid, Method method);

  struct Replicate {
    Eigen::VectorXd root;      // per grid point
    Eigen::VectorXd variance;  // S*(t); only filled for the Studentized method
  };

  /// Roots of the replicate with the given positive counts at the original times.
  Replicate replicate(const CountVector& positives) const;

  /// Draws the replicate with index `index` under master seed `seed`.
  Replicate replicate(std::uint64_t seed, std::uint64_t index) const;

  /// Band from B replicates (rows) of roots and variances.
  ConfidenceBand band(const Eigen::MatrixXd& roots, const Eigen::MatrixXd& variances,
                      double alpha) const;

  const CurrentStatusSample& sample() const noexcept { return sample_; }
  const Eigen::VectorXd& grid() const noexcept { return grid_; }
  Method method() const noexcept { return method_; }
  /// F~(T_j), the resampling probabilities.
  const Eigen::VectorXd& probabilities() const noexcept { return probabilities_; }
  /// Band center: F~(t) for the SMLE methods, F^(t) for Sen-Xu.
  const Eigen::VectorXd& center() const noexcept { return center_; }
  /// Subtracted from the replicate estimate to form the root.
  const Eigen::VectorXd& offset() const noexcept { return offset_; }
  /// S(t) of the original sample (Studentized only).
  const Eigen::VectorXd& variance() const noexcept { return variance_; }
  const Eigen::VectorXd& bandwidths() const noexcept { return bandwidths_; }

 private:
  CurrentStatusSample sample_;
  Kernel kernel_;
  BandwidthSpec bandwidth_;
  Eigen::VectorXd grid_;
  Method method_;
  Eigen::VectorXd bandwidths_;
  Eigen::VectorXd probabilities_;
  Eigen::VectorXd center_;
  Eigen::VectorXd offset_;
  Eigen::VectorXd variance_;
};

/// Runs config.replicates replicates of `engine` and assembles the band.
ConfidenceBand run_bootstrap(const SmoothBootstrap& engine, const BootstrapConfig& config);

ConfidenceBand ci_smle_classical(const CurrentStatusSample& sample, Kernel kernel,
                                 const BandwidthSpec& bandwidth, const Eigen::VectorXd& grid,
                                 const BootstrapConfig& config);

ConfidenceBand ci_smle_studentized(const CurrentStatusSample& sample, Kernel kernel,
                                   const BandwidthSpec& bandwidth, const Eigen::VectorXd& grid,
                                   const BootstrapConfig& config);

/// `bandwidth` is the one of the smooth estimate the indicators are drawn from
/// (conventionally M n^-1/5).
ConfidenceBand ci_sen_xu(const CurrentStatusSample& sample, Kernel kernel,
                         const BandwidthSpec& bandwidth, const Eigen::VectorXd& grid,
                         const BootstrapConfig& config);

}  // namespace curstat
