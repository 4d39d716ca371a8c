#pragma once

#include "curstat/rng.hpp"

#include <Eigen/Core>

#include <string>
#include <type_traits>
#include <string_view>

namespace curstat {

/// Symmetric kernel densities supported on [-1, 1].
enum class Kernel { triweight, epanechnikov };

std::string_view to_string(Kernel kernel);
Kernel parse_kernel(std::string_view name);

/// Scalar types for the kernel formulas (anything that is not an Eigen expression).
template <typename T>
concept KernelScalar = !std::is_base_of_v<Eigen::EigenBase<T>, T>;

/// Kernel density K(u).
template <KernelScalar Scalar>
Scalar density(Kernel kernel, Scalar u) {
  if (!(u > Scalar(-1) && u < Scalar(1))) return Scalar(0);
  const Scalar v = Scalar(1) - u * u;
  switch (kernel) {
    case Kernel::triweight:
      return Scalar(35) / Scalar(32) * v * v * v;
    case Kernel::epanechnikov:
      return Scalar(3) / Scalar(4) * v;
  }
  return Scalar(0);
}

/// Integrated kernel IK(u) = int_{-inf}^u K(x) dx.
template <KernelScalar Scalar>
Scalar integrated(Kernel kernel, Scalar u) {
  if (!(u > Scalar(-1))) return Scalar(0);
  if (!(u < Scalar(1))) return Scalar(1);
  const Scalar u2 = u * u;
  switch (kernel) {
    case Kernel::triweight:
      return Scalar(1) / Scalar(2) +
             Scalar(35) / Scalar(32) *
                 u * (Scalar(1) - u2 + Scalar(3) / Scalar(5) * u2 * u2 -
                      u2 * u2 * u2 / Scalar(7));
    case Kernel::epanechnikov:
      return Scalar(1) / Scalar(2) + Scalar(3) / Scalar(4) * u * (Scalar(1) - u2 / Scalar(3));
  }
  return Scalar(0);
}

template <typename Derived>
auto density(Kernel kernel, const Eigen::ArrayBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  return u.unaryExpr([kernel](Scalar x) { return density(kernel, x); });
}

template <typename Derived>
auto integrated(Kernel kernel, const Eigen::ArrayBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  return u.unaryExpr([kernel](Scalar x) { return integrated(kernel, x); });
}

/// Convolution CDF  K~(x) = int IK(x - w) K(w) dw : the distribution function
/// of the sum of two independent kernel variables. Zero below -2, one above 2.
double convolution_cdf(Kernel kernel, double x);

/// int K(u)^2 du in closed form.
double roughness(Kernel kernel);
/// int u^2 K(u) du in closed form.
double second_moment(Kernel kernel);

/// Scaled forms K_h(u) = K(u/h)/h, IK_h(u) = IK(u/h), K~_h(u) = K~(u/h).
inline double scaled_density(Kernel kernel, double u, double h) { return density(kernel, u / h) / h; }
inline double scaled_integrated(Kernel kernel, double u, double h) { return integrated(kernel, u / h); }
inline double scaled_convolution(Kernel kernel, double u, double h) { return convolution_cdf(kernel, u / h); }

enum class WeightKind { integrated, convolution };

/// Reflected weight  W(t-x) + W(t+x) - W(2M-t-x)  with W = IK_h or K~_h.
///
/// The integrated form is a distribution function in t running from 0 at t = 0
/// to 1 at t = M as long as 0 < h <= M. The convolution form is only used for
/// the integrated smoothed estimator, whose closed form needs 0 < h <= M/3.
/// Throws InvalidInput outside those ranges or for t, x outside [0, M].
double boundary_weight(Kernel kernel, double t, double x, double h, double upper, WeightKind kind);

/// One draw from the kernel density (inverse CDF).
double draw(Kernel kernel, RandomStream& rng);

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
QuadratureRule gauss_legendre(int order);

namespace detail {
double reflected_integrated(Kernel kernel, double t, double x, double h, double upper);
double reflected_convolution(Kernel kernel, double t, double x, double h, double upper);
}  // namespace detail

}  // namespace curstat
