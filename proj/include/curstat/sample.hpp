#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>

namespace curstat {

using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Current status data in aggregated form: distinct inspection times t_j with
/// the number of observations w_j at t_j and the number f_j of them whose
/// event had already happened (indicator one). Everything downstream works on
/// this sufficient statistic.
///
/// Invariants: times strictly increasing and inside (0, M]; w_j > 0;
/// 0 <= f_j <= w_j. M defaults to the largest observed time.
class CurrentStatusSample {
 public:
  CurrentStatusSample() = default;

  /// Aggregates raw (T_i, Delta_i) pairs. Indicators must be 0 or 1.
  static CurrentStatusSample from_observations(std::span<const double> times,
                                               std::span<const int> indicators,
                                               std::optional<double> upper = std::nullopt);

  /// Builds a sample from (time, count, positives) records in any order;
  /// repeated times are merged.
  static CurrentStatusSample from_counts(std::span<const double> times,
                                         std::span<const std::int64_t> weights,
                                         std::span<const std::int64_t> positives,
                                         std::optional<double> upper = std::nullopt);

  /// Same inspection times and weights with new positive counts (a bootstrap
  /// replicate that keeps the T_i fixed).
  CurrentStatusSample with_positives(const CountVector& positives) const;

  const Eigen::VectorXd& times() const noexcept { return times_; }
  const CountVector& weights() const noexcept { return weights_; }
  const CountVector& positives() const noexcept { return positives_; }
  double upper() const noexcept { return upper_; }

  /// Number of observations n.
  std::int64_t size() const noexcept { return total_; }
  /// Number of distinct inspection times m.
  Eigen::Index distinct() const noexcept { return times_.size(); }
  bool empty() const noexcept { return total_ == 0; }

  friend bool operator==(const CurrentStatusSample& a, const CurrentStatusSample& b) {
    return a.upper_ == b.upper_ && a.times_ == b.times_ && a.weights_ == b.weights_ &&
           a.positives_ == b.positives_;
  }

 private:
  void validate() const;

  Eigen::VectorXd times_;
  CountVector weights_;
  CountVector positives_;
  double upper_ = 0.0;
  std::int64_t total_ = 0;
};

}  // namespace curstat
