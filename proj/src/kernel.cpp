#include "curstat/kernel.hpp"

#include "curstat/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace curstat {

namespace {

constexpr int kConvolutionOrder = 20;

const QuadratureRule& convolution_rule() {
  static const QuadratureRule rule = gauss_legendre(kConvolutionOrder);
  return rule;
}

// int_a^b f(w) dw with the cached rule mapped onto [a, b].
template <typename F>
double integrate_piece(double a, double b, F&& f) {
  const auto& rule = convolution_rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) sum += rule.weights(i) * f(mid + half * rule.nodes(i));
  return half * sum;
}

}  // namespace

std::string_view to_string(Kernel kernel) {
  switch (kernel) {
    case Kernel::triweight:
      return "triweight";
    case Kernel::epanechnikov:
      return "epanechnikov";
  }
  return "unknown";
}

Kernel parse_kernel(std::string_view name) {
  if (name == "triweight") return Kernel::triweight;
  if (name == "epanechnikov") return Kernel::epanechnikov;
  throw InvalidInput("unknown kernel '" + std::string(name) + "'");
}

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw InvalidInput("quadrature order must be positive");
  // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
  // Legendre recurrence, weights 2 * (first eigenvector component)^2.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

double convolution_cdf(Kernel kernel, double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  // The integrand IK(x - w) K(w) is a polynomial between the kinks w = x - 1
  // and w = x + 1, so integrating piecewise makes the rule exact.
  std::array<double, 4> cuts{-1.0, x - 1.0, x + 1.0, 1.0};
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::clamp(cuts[i], -1.0, 1.0);
    const double b = std::clamp(cuts[i + 1], -1.0, 1.0);
    if (b <= a) continue;
    total += integrate_piece(a, b, [&](double w) { return integrated(kernel, x - w) * density(kernel, w); });
  }
  return std::clamp(total, 0.0, 1.0);
}

double roughness(Kernel kernel) {
  switch (kernel) {
    case Kernel::triweight:
      return 350.0 / 429.0;
    case Kernel::epanechnikov:
      return 3.0 / 5.0;
  }
  return 0.0;
}

double second_moment(Kernel kernel) {
  switch (kernel) {
    case Kernel::triweight:
      return 1.0 / 9.0;
    case Kernel::epanechnikov:
      return 1.0 / 5.0;
  }
  return 0.0;
}

namespace detail {

double reflected_integrated(Kernel kernel, double t, double x, double h, double upper) {
  return scaled_integrated(kernel, t - x, h) + scaled_integrated(kernel, t + x, h) -
         scaled_integrated(kernel, 2.0 * upper - t - x, h);
}

double reflected_convolution(Kernel kernel, double t, double x, double h, double upper) {
  return scaled_convolution(kernel, t - x, h) + scaled_convolution(kernel, t + x, h) -
         scaled_convolution(kernel, 2.0 * upper - t - x, h);
}

}  // namespace detail

double boundary_weight(Kernel kernel, double t, double x, double h, double upper, WeightKind kind) {
  if (!(t >= 0.0 && t <= upper) || !(x >= 0.0 && x <= upper)) {
    throw InvalidInput("boundary weight needs t and x in [0, M]");
  }
  if (kind == WeightKind::integrated) {
    if (!(h > 0.0 && h <= upper)) throw InvalidInput("boundary correction needs 0 < h <= M");
    return detail::reflected_integrated(kernel, t, x, h, upper);
  }
  if (!(h > 0.0 && h <= upper / 3.0)) {
    throw InvalidInput("boundary-corrected integrated estimator needs 0 < h <= M/3");
  }
  return detail::reflected_convolution(kernel, t, x, h, upper);
}

double draw(Kernel kernel, RandomStream& rng) {
  const double target = rng.uniform();
  // Safeguarded Newton on IK(u) = target.
  double lo = -1.0, hi = 1.0, u = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double gap = integrated(kernel, u) - target;
    if (gap > 0.0) hi = u; else lo = u;
    const double slope = density(kernel, u);
    double next = slope > 0.0 ? u - gap / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) < 1e-15) return next;
    u = next;
  }
  return u;
}

}  // namespace curstat
