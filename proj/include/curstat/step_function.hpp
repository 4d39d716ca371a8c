#pragma once

#include "curstat/errors.hpp"

#include <Eigen/Core>

#include <algorithm>

namespace curstat {

/// Locations and sizes of the positive increments of a step function.
struct Jumps {
  Eigen::VectorXd locations;
  Eigen::VectorXd masses;
};

/// Nondecreasing step function with values in [0, 1]. values(j) is the value
/// attached to knots(j) and holds until the next knot; the function is 0 left
/// of the first knot and keeps the last value right of the last knot.
template <typename Scalar = double>
class StepFunction {
 public:
  using ValueVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  StepFunction() = default;

  StepFunction(Eigen::VectorXd knots, ValueVector values)
      : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() != values_.size()) throw InvalidInput("knots and values differ in length");
    for (Eigen::Index j = 0; j < knots_.size(); ++j) {
      if (j > 0 && !(knots_(j - 1) < knots_(j))) {
        throw InvalidInput("step function knots must be strictly increasing");
      }
      if (j > 0 && values_(j) < values_(j - 1)) {
        throw InvalidInput("step function values must be nondecreasing");
      }
      if (values_(j) < Scalar(0) || Scalar(1) < values_(j)) {
        throw InvalidInput("step function values must lie in [0, 1]");
      }
    }
  }

  const Eigen::VectorXd& knots() const noexcept { return knots_; }
  const ValueVector& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return knots_.size(); }

  Scalar operator()(double t) const {
    const double* begin = knots_.data();
    const double* end = begin + knots_.size();
    const auto pos = std::upper_bound(begin, end, t) - begin;
    return pos == 0 ? Scalar(0) : values_(pos - 1);
  }

  /// Value at the last knot (total mass of the distribution it represents).
  Scalar last() const { return values_.size() == 0 ? Scalar(0) : values_(values_.size() - 1); }

  friend bool operator==(const StepFunction& a, const StepFunction& b) {
    return a.knots_ == b.knots_ && a.values_ == b.values_;
  }

 private:
  Eigen::VectorXd knots_;
  ValueVector values_;
};

/// Positive increments of a double-valued step function.
inline Jumps jumps_of(const StepFunction<double>& f) {
  const auto& values = f.values();
  Eigen::Index count = 0;
  double previous = 0.0;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (values(j) > previous) ++count;
    previous = values(j);
  }
  Jumps out{Eigen::VectorXd(count), Eigen::VectorXd(count)};
  previous = 0.0;
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    if (values(j) > previous) {
      out.locations(k) = f.knots()(j);
      out.masses(k) = values(j) - previous;
      ++k;
    }
    previous = values(j);
  }
  return out;
}

}  // namespace curstat
