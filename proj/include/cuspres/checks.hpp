#pragma once

// Value-free consistency checks for the quotient evaluators: each logarithmic
// derivative q = y'/y of a Bessel-type solution satisfies a Riccati equation.
// Derivatives use a 5-point central stencil.

#include <algorithm>
#include <cmath>
#include <complex>

#include "cuspres/bessel.hpp"
#include "cuspres/complexfn.hpp"

namespace cuspres::checks {

inline constexpr double kRiccatiStep = 1e-4;

/// Residual of the Riccati equation divided by the largest term in it.
struct RiccatiResidual {
  cplx absolute;
  double scale;

  [[nodiscard]] double relative() const { return std::abs(absolute) / scale; }
};

namespace detail {

template <class F>
cplx five_point(F&& q, double h) {
  return (q(-2.0 * h) - 8.0 * q(-h) + 8.0 * q(h) - q(2.0 * h)) / (12.0 * h);
}

inline double largest(std::initializer_list<double> terms) { return std::max(1.0, std::max(terms)); }

}  // namespace detail

/// q' + q^2 + q/z - (1 + v^2/z^2) for q = kquot(v, .) at real z.
inline RiccatiResidual riccati_k(cplx nu, double z, double h = kRiccatiStep) {
  const auto q_at = [&](double dz) { return kquot(nu, z + dz); };
  const cplx q = q_at(0.0);
  const cplx dq = detail::five_point(q_at, h);
  const cplx source = 1.0 + nu * nu / (z * z);
  return {dq + q * q + q / z - source,
          detail::largest({std::abs(dq), std::abs(q * q), std::abs(q / z), std::abs(source)})};
}

/// Same equation with q = iquot; I_v solves the modified Bessel equation too.
inline RiccatiResidual riccati_i(cplx nu, double z, double h = kRiccatiStep) {
  const auto q_at = [&](double dz) { return iquot(nu, z + dz); };
  const cplx q = q_at(0.0);
  const cplx dq = detail::five_point(q_at, h);
  const cplx source = 1.0 + nu * nu / (z * z);
  return {dq + q * q + q / z - source,
          detail::largest({std::abs(dq), std::abs(q * q), std::abs(q / z), std::abs(source)})};
}

/// q' + q^2 + q/x + (1 - n^2/x^2) for q = hquot(n, .) on the continued branch.
inline RiccatiResidual riccati_h(double n, BranchedArg x, double h = kRiccatiStep) {
  const cplx x0 = x.value();
  const auto q_at = [&](double dx) { return hquot(n, BranchedArg::from_complex_near(x0 + dx, x.arg)); };
  const cplx q = q_at(0.0);
  const cplx dq = detail::five_point(q_at, h);
  const cplx source = 1.0 - n * n / (x0 * x0);
  return {dq + q * q + q / x0 + source,
          detail::largest({std::abs(dq), std::abs(q * q), std::abs(q / x0), std::abs(source)})};
}

/// Same equation for q = jquot(n, .).
inline RiccatiResidual riccati_j(double n, cplx x, double h = kRiccatiStep) {
  const auto q_at = [&](double dx) { return jquot(n, x + dx); };
  const cplx q = q_at(0.0);
  const cplx dq = detail::five_point(q_at, h);
  const cplx source = 1.0 - n * n / (x * x);
  return {dq + q * q + q / x + source,
          detail::largest({std::abs(dq), std::abs(q * q), std::abs(q / x), std::abs(source)})};
}

}  // namespace cuspres::checks
