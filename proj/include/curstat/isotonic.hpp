#pragma once

// Nonparametric maximum likelihood for current status data.
//
// The MLE at the sorted distinct inspection times is the left-continuous slope
// of the greatest convex minorant of the cumulative sum diagram
//   (0, 0), (W_1, F_1), ..., (W_m, F_m),   W_i = sum_{j<=i} w_j, F_i = sum_{j<=i} f_j,
// computed here by pool-adjacent-violators on integer block sums. Every fitted
// value is a single division (sum of positives)/(sum of weights) over a block,
// so two routes that find the same blocks produce bitwise identical values.

#include "curstat/errors.hpp"
#include "curstat/sample.hpp"
#include "curstat/step_function.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace curstat {

namespace detail {

struct Block {
  std::int64_t positives;
  std::int64_t weight;
  Eigen::Index first;
  Eigen::Index last;  // inclusive
};

/// true when positives_a / weight_a >= positives_b / weight_b.
inline bool ratio_not_less(const Block& a, const Block& b) noexcept {
  return static_cast<__int128>(a.positives) * b.weight >=
         static_cast<__int128>(b.positives) * a.weight;
}

/// PAVA over entries [begin, end) of the aggregated counts.
inline std::vector<Block> pool_adjacent_violators(const CountVector& positives,
                                                  const CountVector& weights,
                                                  Eigen::Index begin, Eigen::Index end) {
  std::vector<Block> stack;
  stack.reserve(static_cast<std::size_t>(end - begin));
  for (Eigen::Index j = begin; j < end; ++j) {
    stack.push_back({positives(j), weights(j), j, j});
    while (stack.size() >= 2 && ratio_not_less(stack[stack.size() - 2], stack.back())) {
      const Block top = stack.back();
      stack.pop_back();
      Block& below = stack.back();
      below.positives += top.positives;
      below.weight += top.weight;
      below.last = top.last;
    }
  }
  return stack;
}

template <typename Scalar>
void write_block_values(const std::vector<Block>& blocks,
                        Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& out) {
  for (const Block& block : blocks) {
    const Scalar value = Scalar(block.positives) / Scalar(block.weight);
    for (Eigen::Index j = block.first; j <= block.last; ++j) out(j) = value;
  }
}

inline Eigen::Index count_not_after(const Eigen::VectorXd& times, double t) {
  Eigen::Index k = 0;
  while (k < times.size() && times(k) <= t) ++k;
  return k;
}

}  // namespace detail

/// Unconstrained MLE, one value per distinct inspection time.
template <typename Scalar = double>
StepFunction<Scalar> fit_mle(const CurrentStatusSample& sample) {
  if (sample.empty()) throw InvalidInput("cannot fit the MLE of an empty sample");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values(sample.distinct());
  detail::write_block_values(
      detail::pool_adjacent_violators(sample.positives(), sample.weights(), 0, sample.distinct()),
      values);
  return StepFunction<Scalar>(sample.times(), std::move(values));
}

/// MLE under the constraint F(t0) = theta0: PAVA on the times <= t0 capped
/// above at theta0, PAVA on the times > t0 floored at theta0.
/// t0 may equal M (the constraint then covers every observation).
template <typename Scalar = double>
StepFunction<Scalar> fit_constrained_mle(const CurrentStatusSample& sample, double t0,
                                         Scalar theta0) {
  if (sample.empty()) throw InvalidInput("cannot fit the MLE of an empty sample");
  if (!(t0 > 0.0) || t0 > sample.upper()) throw InvalidInput("t0 must lie in (0, M]");
  if (theta0 < Scalar(0) || Scalar(1) < theta0) throw InvalidInput("theta0 must lie in [0, 1]");

  const Eigen::Index m = sample.distinct();
  const Eigen::Index split = detail::count_not_after(sample.times(), t0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values(m);
  detail::write_block_values(
      detail::pool_adjacent_violators(sample.positives(), sample.weights(), 0, split), values);
  detail::write_block_values(
      detail::pool_adjacent_violators(sample.positives(), sample.weights(), split, m), values);
  for (Eigen::Index j = 0; j < split; ++j) {
    if (theta0 < values(j)) values(j) = theta0;
  }
  for (Eigen::Index j = split; j < m; ++j) {
    if (values(j) < theta0) values(j) = theta0;
  }
  return StepFunction<Scalar>(sample.times(), std::move(values));
}

/// Brute-force max-min formula
///   F(t_i) = max_{s<=i} min_{u>=i} (f_s + ... + f_u) / (w_s + ... + w_u).
/// O(m^3); a test oracle for small samples.
template <typename Scalar = double>
StepFunction<Scalar> maxmin_oracle(const CurrentStatusSample& sample) {
  if (sample.empty()) throw InvalidInput("cannot fit the MLE of an empty sample");
  const Eigen::Index m = sample.distinct();
  CountVector cum_f = CountVector::Zero(m + 1);
  CountVector cum_w = CountVector::Zero(m + 1);
  for (Eigen::Index j = 0; j < m; ++j) {
    cum_f(j + 1) = cum_f(j) + sample.positives()(j);
    cum_w(j + 1) = cum_w(j) + sample.weights()(j);
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    Scalar best{};
    for (Eigen::Index s = 0; s <= i; ++s) {
      Scalar worst{};
      for (Eigen::Index u = i; u < m; ++u) {
        const Scalar mean = Scalar(cum_f(u + 1) - cum_f(s)) / Scalar(cum_w(u + 1) - cum_w(s));
        if (u == i || mean < worst) worst = mean;
      }
      if (s == 0 || best < worst) best = worst;
    }
    values(i) = best;
  }
  return StepFunction<Scalar>(sample.times(), std::move(values));
}

/// Bernoulli log-likelihood sum_j f_j log p_j + (w_j - f_j) log(1 - p_j) for
/// probabilities p_j given at the sample's distinct times, with 0 log 0 = 0.
/// Returns -inf when a positive count meets p = 0 or a negative count meets p = 1.
inline double log_likelihood_at_times(const CurrentStatusSample& sample,
                                      const Eigen::Ref<const Eigen::VectorXd>& probabilities) {
  if (probabilities.size() != sample.distinct()) {
    throw InvalidInput("one probability per distinct time expected");
  }
  constexpr double minus_infinity = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (Eigen::Index j = 0; j < sample.distinct(); ++j) {
    const double p = probabilities(j);
    const auto ones = sample.positives()(j);
    const auto zeros = sample.weights()(j) - ones;
    if (ones > 0) {
      if (p <= 0.0) return minus_infinity;
      total += static_cast<double>(ones) * std::log(p);
    }
    if (zeros > 0) {
      if (p >= 1.0) return minus_infinity;
      total += static_cast<double>(zeros) * std::log1p(-p);
    }
  }
  return total;
}

/// Log-likelihood of any function evaluable at the inspection times.
template <typename Distribution>
double log_likelihood(const CurrentStatusSample& sample, const Distribution& F) {
  Eigen::VectorXd p(sample.distinct());
  for (Eigen::Index j = 0; j < p.size(); ++j) p(j) = static_cast<double>(F(sample.times()(j)));
  return log_likelihood_at_times(sample, p);
}

}  // namespace curstat
