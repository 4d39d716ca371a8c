#include "curstat/sample.hpp"

#include "curstat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace curstat {

CurrentStatusSample CurrentStatusSample::from_observations(std::span<const double> times,
                                                           std::span<const int> indicators,
                                                           std::optional<double> upper) {
  if (times.size() != indicators.size()) {
    throw InvalidInput("times and indicators differ in length");
  }
  std::vector<std::int64_t> ones(times.size(), 1);
  std::vector<std::int64_t> positives(times.size());
  for (std::size_t i = 0; i < indicators.size(); ++i) {
    if (indicators[i] != 0 && indicators[i] != 1) {
      throw InvalidInput("indicator must be 0 or 1, got " + std::to_string(indicators[i]));
    }
    positives[i] = indicators[i];
  }
  return from_counts(times, ones, positives, upper);
}

CurrentStatusSample CurrentStatusSample::from_counts(std::span<const double> times,
                                                     std::span<const std::int64_t> weights,
                                                     std::span<const std::int64_t> positives,
                                                     std::optional<double> upper) {
  if (times.size() != weights.size() || times.size() != positives.size()) {
    throw InvalidInput("times, weights and positives differ in length");
  }
  if (times.empty()) throw InvalidInput("empty sample");

  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  std::vector<double> t;
  std::vector<std::int64_t> w, f;
  for (std::size_t k : order) {
    if (!std::isfinite(times[k])) throw InvalidInput("non-finite inspection time");
    if (weights[k] <= 0) throw InvalidInput("counts must be positive");
    if (positives[k] < 0 || positives[k] > weights[k]) {
      throw InvalidInput("positives must lie in [0, count]");
    }
    if (!t.empty() && t.back() == times[k]) {
      w.back() += weights[k];
      f.back() += positives[k];
    } else {
      t.push_back(times[k]);
      w.push_back(weights[k]);
      f.push_back(positives[k]);
    }
  }

  CurrentStatusSample sample;
  sample.times_ = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  sample.weights_ = Eigen::Map<const CountVector>(w.data(), static_cast<Eigen::Index>(w.size()));
  sample.positives_ = Eigen::Map<const CountVector>(f.data(), static_cast<Eigen::Index>(f.size()));
  sample.upper_ = upper.value_or(t.back());
  sample.total_ = sample.weights_.sum();
  sample.validate();
  return sample;
}

CurrentStatusSample CurrentStatusSample::with_positives(const CountVector& positives) const {
  if (positives.size() != weights_.size()) {
    throw InvalidInput("replicate positives have the wrong length");
  }
  CurrentStatusSample copy = *this;
  copy.positives_ = positives;
  for (Eigen::Index j = 0; j < positives.size(); ++j) {
    if (positives(j) < 0 || positives(j) > weights_(j)) {
      throw InvalidInput("positives must lie in [0, count]");
    }
  }
  return copy;
}

void CurrentStatusSample::validate() const {
  if (!std::isfinite(upper_) || upper_ <= 0.0) throw InvalidInput("upper bound M must be positive");
  if (times_(0) <= 0.0) throw InvalidInput("inspection times must be positive");
  if (times_(times_.size() - 1) > upper_) {
    throw InvalidInput("inspection time exceeds the upper bound M");
  }
}

}  // namespace curstat
