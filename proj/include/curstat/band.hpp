#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string_view>
#include <vector>

namespace curstat {

enum class Method { smle_classical, smle_studentized, sen_xu, banerjee_wellner };

/// CLI spelling: smle-classical, smle-studentized, sen-xu, banerjee-wellner.
std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// Pointwise confidence band on a grid. lower <= upper and both lie in
/// [0, 1]; the bootstrap bands need not contain their own estimate.
struct ConfidenceBand {
  Eigen::VectorXd grid;
  Eigen::VectorXd estimate;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double level = 0.95;
  Method method = Method::smle_studentized;
  /// 1 where a Studentized interval fell back to the classical one because a
  /// variance estimate was zero.
  std::vector<std::uint8_t> fallback;

  Eigen::Index size() const noexcept { return grid.size(); }
  Eigen::VectorXd length() const { return upper - lower; }

  friend bool operator==(const ConfidenceBand& a, const ConfidenceBand& b) {
    return a.grid == b.grid && a.estimate == b.estimate && a.lower == b.lower &&
           a.upper == b.upper && a.level == b.level && a.method == b.method &&
           a.fallback == b.fallback;
  }
};

}  // namespace curstat
