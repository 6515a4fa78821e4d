#pragma once

// Complex scalar routines: log-gamma, the Lambert-type solve of
// v log v = zeta, and complex numbers carried with an unreduced argument.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>

#include "cuspres/errors.hpp"

namespace cuspres {

using cplx = std::complex<double>;

inline constexpr double kPoleTolerance = 1e-8;

/// A nonzero complex number stored as (log|w|, arg w) with the argument kept
/// unreduced, i.e. a point on the universal cover of C \ {0}.
struct BranchedArg {
  double modulus_log = 0.0;
  double arg = 0.0;

  /// Principal representative, arg in (-pi, pi].
  static BranchedArg from_complex(cplx w) {
    if (w == cplx{0.0, 0.0}) throw DomainError("BranchedArg: zero has no argument");
    return {std::log(std::abs(w)), std::arg(w)};
  }

  /// Representative of w whose argument lies closest to `reference_arg`.
  static BranchedArg from_complex_near(cplx w, double reference_arg) {
    BranchedArg out = from_complex(w);
    const double two_pi = 2.0 * std::numbers::pi;
    out.arg += two_pi * std::round((reference_arg - out.arg) / two_pi);
    return out;
  }

  static BranchedArg from_polar(double modulus, double arg) { return {std::log(modulus), arg}; }

  [[nodiscard]] double modulus() const { return std::exp(modulus_log); }

  [[nodiscard]] cplx value() const { return std::polar(std::exp(modulus_log), arg); }

  /// exp(nu * (L + iA)), the power taken on this sheet.
  [[nodiscard]] cplx pow(cplx nu) const { return std::exp(nu * cplx{modulus_log, arg}); }

  friend BranchedArg operator*(BranchedArg lhs, BranchedArg rhs) {
    return {lhs.modulus_log + rhs.modulus_log, lhs.arg + rhs.arg};
  }
};

/// Right-half-plane target of v log v = zeta.
class LambertQuery {
 public:
  explicit LambertQuery(cplx zeta) : zeta_(zeta) {
    if (!(zeta.real() > 0.0)) throw DomainError("LambertQuery: Re(zeta) must be positive");
  }
  [[nodiscard]] cplx zeta() const { return zeta_; }

 private:
  cplx zeta_;
};

namespace detail {

// B_{2n} / (2n (2n-1)), n = 1..10.
inline constexpr std::array<double, 10> kStirlingCoefficients = {
    1.0 / 12.0,         -1.0 / 360.0,          1.0 / 1260.0,        -1.0 / 1680.0,
    1.0 / 1188.0,       -691.0 / 360360.0,     1.0 / 156.0,         -3617.0 / 122400.0,
    43867.0 / 244188.0, -174611.0 / 125400.0,
};

inline bool near_nonpositive_integer(cplx z) {
  if (z.real() > 0.5) return false;
  const double n = std::round(z.real());
  return n <= 0.0 && std::abs(z - cplx{n, 0.0}) < kPoleTolerance;
}

// Stirling series, valid for |w| >= 15 with Re w > 0.
inline cplx log_gamma_stirling(cplx w) {
  const cplx inv = 1.0 / w;
  const cplx inv2 = inv * inv;
  cplx tail = 0.0;
  cplx power = inv;
  for (double c : kStirlingCoefficients) {
    tail += c * power;
    power *= inv2;
  }
  return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * std::numbers::pi) + tail;
}

// log sin(pi z) without forming exponentials that overflow for large |Im z|.
// The imaginary part is some branch of arg sin(pi z).
inline cplx log_sin_pi(cplx z) {
  const double pi = std::numbers::pi;
  const cplx i{0.0, 1.0};
  if (std::abs(z.imag()) < 20.0) return std::log(std::sin(pi * z));
  if (z.imag() > 0.0) {
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
    return -i * pi * z + std::log(cplx{0.0, 0.5}) + std::log(1.0 - std::exp(2.0 * i * pi * z));
  }
  // sin(pi z) = (-i/2) e^{i pi z} (1 - e^{-2 i pi z})
  return i * pi * z + std::log(cplx{0.0, -0.5}) + std::log(1.0 - std::exp(-2.0 * i * pi * z));
}

}  // namespace detail

/// A branch of log Gamma(z), continuous on the right half-plane (it agrees
/// with the standard principal log-gamma there). Uses upward recurrence into
/// the Stirling region and the reflection formula for Re z < 1/2.
inline cplx log_gamma(cplx z) {
  if (detail::near_nonpositive_integer(z)) {
    throw PoleError("log_gamma: argument within tolerance of a nonpositive integer");
  }
  if (z.real() < 0.5) {
    const double pi = std::numbers::pi;
    return std::log(pi) - detail::log_sin_pi(z) - log_gamma(1.0 - z);
  }
  constexpr double kStirlingRadius = 15.0;
  cplx shift_logs = 0.0;
  cplx w = z;
  while (std::abs(w) < kStirlingRadius) {
    shift_logs += std::log(w);
    w += 1.0;
  }
  return detail::log_gamma_stirling(w) - shift_logs;
}

/// log(Gamma(nu) / Gamma(-nu)). Returns nullopt when Gamma(-nu) is at a pole,
/// i.e. the ratio itself is zero.
inline std::optional<cplx> gamma_ratio_log(cplx nu) {
  if (detail::near_nonpositive_integer(nu)) {
    throw PoleError("gamma_ratio_log: Gamma(nu) has a pole");
  }
  if (detail::near_nonpositive_integer(-nu)) return std::nullopt;
  return log_gamma(nu) - log_gamma(-nu);
}

/// Solves v log v = zeta for the root with Re v > 1 (principal Lambert W:
/// v = zeta / W(zeta)). Halley iteration on u e^u = zeta, u = log v, seeded
/// with log zeta - log log zeta.
inline cplx solve_nu_log_nu(const LambertQuery& query) {
  const cplx zeta = query.zeta();
  if (std::abs(zeta) < std::numbers::e * (1.0 - 1e-12)) {
    throw DomainError("solve_nu_log_nu: |zeta| must be at least e");
  }
  constexpr int kMaxIter = 50;
  const cplx log_zeta = std::log(zeta);
  cplx u = log_zeta - std::log(log_zeta);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    // f(u) = u + log u - log zeta has the same root and avoids e^u.
    const cplx f = u + std::log(u) - log_zeta;
    const cplx f1 = 1.0 + 1.0 / u;
    const cplx f2 = -1.0 / (u * u);
    const cplx step = 2.0 * f * f1 / (2.0 * f1 * f1 - f * f2);
    u -= step;
    if (std::abs(step) <= 1e-15 * std::abs(u)) {
      const cplx nu = zeta / u;
      if (std::abs(nu * std::log(nu) - zeta) > 1e-12 * std::abs(zeta)) {
        throw ConvergenceError("solve_nu_log_nu: converged iterate fails the residual check");
      }
      return nu;
    }
  }
  throw ConvergenceError("solve_nu_log_nu: no convergence in 50 Halley steps");
}

}  // namespace cuspres
