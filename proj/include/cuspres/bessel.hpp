#pragma once

// Logarithmic-derivative quotients of Bessel functions.
//
// K'_v/K_v and I'_v/I_v are evaluated at small fixed argument and large
// complex order through the normalised series 1+R_i, so no Gamma value or
// power (z/2)^v is ever formed outside log space. H2'_n/H2_n and J'_n/J_n are
// evaluated at large complex argument from Hankel's asymptotic series with
// optimal truncation; H2'/H2 is continued to |x| < 10 through its Riccati
// equation.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "cuspres/complexfn.hpp"
#include "cuspres/errors.hpp"

namespace cuspres {

/// Normalised power-series factors of I_{+v}, I_{-v} and their derivatives:
///   I_v(z)   = (z/2)^v  / Gamma(1+v) (1+R1)
///   I_-v(z)  = (z/2)^-v / Gamma(1-v) (1+R2)
///   I'_v(z)  =  (v/z) (z/2)^v  / Gamma(1+v) (1+R3)
///   I'_-v(z) = -(v/z) (z/2)^-v / Gamma(1-v) (1+R4)
struct BesselRemainders {
  cplx one_plus_r1{1.0};
  cplx one_plus_r2{1.0};
  cplx one_plus_r3{1.0};
  cplx one_plus_r4{1.0};
  int terms_used = 0;
  double truncation_estimate = 0.0;
};

/// Truncated Hankel asymptotic factors P, Q, R, S of order n at x.
struct HankelSeries {
  cplx p{1.0};
  cplx q{0.0};
  cplx r{1.0};
  cplx s{0.0};
  int terms_used = 0;
  double smallest_term = 0.0;
};

inline constexpr int kMaxSeriesTerms = 300;
inline constexpr double kSeriesRelTol = 1e-16;
inline constexpr double kHankelMinModulus = 10.0;
inline constexpr double kHankelAccuracy = 1e-8;
inline constexpr double kHankelContinuationStart = 20.0;
/// Largest tolerated amplification of the unwanted solution in the continuation.
inline constexpr double kHankelContinuationGrowth = 1e3;

namespace detail {

/// Multiplicative perturbation of the second Hankel coefficient. Zero in
/// normal operation; the self-check fault injection sets it.
inline std::atomic<double>& hankel_fault() {
  static std::atomic<double> value{0.0};
  return value;
}

struct SeriesPair {
  cplx value{1.0};       // sum_k t_k
  cplx derivative{1.0};  // sum_k (v+2k)/v t_k
  int terms = 0;
  double last_term = 0.0;
};

// t_k = (z^2/4)^k / (k! (v+1)_k); returns sum t_k and sum (v+2k)/v t_k.
inline SeriesPair plus_series(cplx nu, double z, double rel_tol) {
  const double quarter_z2 = 0.25 * z * z;
  SeriesPair out;
  cplx term = 1.0;
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    const cplx factor = nu + static_cast<double>(k);
    if (std::abs(factor) < kPoleTolerance) {
      throw PoleError("remainders: Pochhammer factor vanishes (order near a negative integer)");
    }
    term *= quarter_z2 / (static_cast<double>(k) * factor);
    const cplx weighted = term * (nu + 2.0 * k) / nu;
    out.value += term;
    out.derivative += weighted;
    out.terms = k;
    out.last_term = std::max(std::abs(term), std::abs(weighted));
    if (std::abs(term) < rel_tol * std::abs(out.value) &&
        std::abs(weighted) < rel_tol * std::abs(out.derivative)) {
      return out;
    }
  }
  throw ConvergenceError("remainders: series did not converge within 300 terms");
}

}  // namespace detail

/// The four quotients 1+R1..1+R4 at order nu and real argument z != 0.
inline BesselRemainders remainders(cplx nu, double z, double rel_tol = kSeriesRelTol) {
  if (z == 0.0 || std::abs(z) > 20.0) throw DomainError("remainders: need 0 < |z| <= 20");
  if (std::abs(nu) < kPoleTolerance) throw PoleError("remainders: order zero");
  const auto plus = detail::plus_series(nu, z, rel_tol);
  // The -v series is the +v series at -v: (1+R4)(v) = (1+R3)(-v).
  const auto minus = detail::plus_series(-nu, z, rel_tol);
  BesselRemainders out;
  out.one_plus_r1 = plus.value;
  out.one_plus_r3 = plus.derivative;
  out.one_plus_r2 = minus.value;
  out.one_plus_r4 = minus.derivative;
  out.terms_used = std::max(plus.terms, minus.terms);
  out.truncation_estimate = std::max(plus.last_term, minus.last_term);
  return out;
}

namespace detail {

// log g(v) = -2 v log(z/2) + log Gamma(v) / Gamma(-v); nullopt when g = 0.
inline std::optional<cplx> log_g(cplx nu, double z) {
  if (!(z > 0.0)) throw DomainError("g_of_nu: z must be positive");
  const auto ratio = gamma_ratio_log(nu);
  if (!ratio) return std::nullopt;
  return -2.0 * nu * std::log(0.5 * z) + *ratio;
}

}  // namespace detail

/// g(v) = (z/2)^{-2v} Gamma(v)/Gamma(-v), formed in log space.
inline cplx g_of_nu(cplx nu, double z) {
  const auto lg = detail::log_g(nu, z);
  return lg ? std::exp(*lg) : cplx{0.0};
}

/// K'_v(z)/K_v(z) = (v/z) (1+R3 - g(1+R4)) / (1+R1 + g(1+R2)).
inline cplx kquot(cplx nu, double z, double rel_tol = kSeriesRelTol) {
  if (!(z > 0.0)) throw DomainError("kquot: z must be positive");
  const auto lg = detail::log_g(nu, z);
  const auto plus = detail::plus_series(nu, z, rel_tol);
  if (!lg) return (nu / z) * plus.derivative / plus.value;
  const auto minus = detail::plus_series(-nu, z, rel_tol);
  cplx num;
  cplx den;
  double scale;
  if (lg->real() <= 0.0) {
    const cplx g = std::exp(*lg);
    num = plus.derivative - g * minus.derivative;
    den = plus.value + g * minus.value;
    scale = std::abs(plus.value) + std::abs(g * minus.value);
  } else {
    // |g| > 1: divide through by g.
    const cplx inv_g = std::exp(-*lg);
    num = inv_g * plus.derivative - minus.derivative;
    den = inv_g * plus.value + minus.value;
    scale = std::abs(inv_g * plus.value) + std::abs(minus.value);
  }
  if (std::abs(den) < 1e-14 * scale) {
    throw NearZeroError("kquot: K_v(z) vanishes to working precision");
  }
  return (nu / z) * num / den;
}

/// I'_v(z)/I_v(z) = (v/z) (1+R3)/(1+R1); z may be negative.
inline cplx iquot(cplx nu, double z, double rel_tol = kSeriesRelTol) {
  if (z == 0.0 || std::abs(z) > 20.0) throw DomainError("iquot: need 0 < |z| <= 20");
  const auto plus = detail::plus_series(nu, z, rel_tol);
  if (std::abs(plus.value) < 1e-14) throw NearZeroError("iquot: I_v(z) vanishes");
  return (nu / z) * plus.derivative / plus.value;
}

/// Hankel's asymptotic factors with mu = 4n^2:
///   a_k = (mu-1)(mu-9)...(mu-(2k-1)^2) / (k! 8^k),   b_k = a_{k-1} (mu+4k^2-1) / (8k),
///   P = sum (-1)^j a_{2j} x^{-2j},   Q = sum (-1)^j a_{2j+1} x^{-2j-1},
///   R, S likewise from b_k.
/// Summed up to (not including) the smallest term.
inline HankelSeries hankel_series(double n, BranchedArg x) {
  const double pi = std::numbers::pi;
  if (!(x.arg > -2.0 * pi && x.arg < pi)) {
    throw DomainError("hankel_series: arg x must lie in (-2pi, pi)");
  }
  const double mu = 4.0 * n * n;
  const cplx inv_x = 1.0 / x.value();
  const double modulus = x.modulus();

  // Power-series coefficients in 1/x, c_k = i^? handled via sign pattern below.
  cplx a_prev = 1.0;  // a_{k-1} x^{-(k-1)}
  cplx sum_p = 1.0, sum_q = 0.0, sum_r = 1.0, sum_s = 0.0;
  double smallest = 1.0;
  int used = 0;
  const int max_terms = std::min(400, static_cast<int>(2.0 * modulus) + 20);

  struct Term {
    cplx a, b;
  };
  std::vector<Term> terms;
  std::vector<double> magnitudes;
  for (int k = 1; k <= max_terms; ++k) {
    const double odd = 2.0 * k - 1.0;
    double a_scale = (mu - odd * odd) / (8.0 * k);
    const double b_scale = (mu + 4.0 * k * k - 1.0) / (8.0 * k);
    if (k == 2) a_scale *= 1.0 + detail::hankel_fault().load(std::memory_order_relaxed);
    const cplx a_k = a_prev * a_scale * inv_x;
    const cplx b_k = a_prev * b_scale * inv_x;
    terms.push_back({a_k, b_k});
    magnitudes.push_back(std::max(std::abs(a_k), std::abs(b_k)));
    a_prev = a_k;
    if (magnitudes.back() == 0.0 || magnitudes.back() < 1e-18) break;
  }

  if (modulus < kHankelMinModulus) {
    // Only exact (terminating) expansions are accepted below the floor.
    const bool terminates = !magnitudes.empty() && magnitudes.back() == 0.0;
    if (!terminates) throw DomainError("hankel_series: |x| must be at least 10");
  }

  // Optimal truncation: stop before the smallest term.
  std::size_t stop = terms.size();
  smallest = magnitudes.empty() ? 0.0 : magnitudes[0];
  for (std::size_t k = 0; k < magnitudes.size(); ++k) {
    if (magnitudes[k] < smallest) smallest = magnitudes[k];
  }
  for (std::size_t k = 0; k < magnitudes.size(); ++k) {
    if (magnitudes[k] == smallest) {
      stop = (smallest < 1e-18) ? k + 1 : k;
      break;
    }
  }
  for (std::size_t idx = 0; idx < stop; ++idx) {
    const int k = static_cast<int>(idx) + 1;
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      sum_p += sign * terms[idx].a;
      sum_r += sign * terms[idx].b;
    } else {
      sum_q += sign * terms[idx].a;
      sum_s += sign * terms[idx].b;
    }
    used = k;
  }
  if (smallest > kHankelAccuracy) {
    throw DomainError("hankel_series: optimal truncation error exceeds 1e-8");
  }
  return {sum_p, sum_q, sum_r, sum_s, used, smallest};
}

inline HankelSeries hankel_series(double n, cplx x) {
  return hankel_series(n, BranchedArg::from_complex(x));
}

namespace detail {

inline cplx hquot_series(double n, BranchedArg x) {
  const auto h = hankel_series(n, x);
  const cplx i{0.0, 1.0};
  return (-i * h.r - h.s) / (h.p - i * h.q);
}

inline bool hankel_terminates(double n) {
  const double twice = 2.0 * std::abs(n);
  return twice == std::floor(twice) && std::fmod(twice, 2.0) == 1.0;
}

// Below the series floor: integrate the Riccati equation
//   q' = -q^2 - q/x - (1 - n^2/x^2)
// inward along the ray of x from |x| = kHankelContinuationStart. For
// sin(arg x) <= 0 H2 is recessive at infinity and the inward direction is
// stable; past that, H1 contamination grows like e^{2 (rho_start - |x|) sin(arg x)},
// and rays where that factor would exceed kHankelContinuationGrowth are refused.
inline cplx hquot_continued(double n, BranchedArg x) {
  namespace odeint = boost::numeric::odeint;
  const double growth = 2.0 * (kHankelContinuationStart - x.modulus()) * std::max(0.0, std::sin(x.arg));
  if (growth > std::log(kHankelContinuationGrowth)) {
    throw DomainError("hquot: |x| < 10 on a ray where the inward continuation is unstable");
  }
  using State = std::array<double, 2>;
  const cplx direction = std::polar(1.0, x.arg);
  const double rho_end = x.modulus();
  const double rho_start = kHankelContinuationStart;
  const cplx q0 = hquot_series(n, BranchedArg::from_polar(rho_start, x.arg));
  State y{q0.real(), q0.imag()};
  const auto rhs = [&](const State& s, State& ds, double rho) {
    const cplx q{s[0], s[1]};
    const cplx xx = rho * direction;
    const cplx dq = direction * (-q * q - q / xx - (1.0 - n * n / (xx * xx)));
    ds = {dq.real(), dq.imag()};
  };
  auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, rhs, y, rho_start, rho_end, -0.01);
  const cplx q{y[0], y[1]};
  if (!std::isfinite(std::abs(q))) throw ConvergenceError("hquot: continuation hit a zero of H2");
  return q;
}

}  // namespace detail

/// H2'_n(x)/H2_n(x) = (-iR - S)/(P - iQ). The argument may lie on the
/// continued sheet arg x in (-2pi, -pi]; the series only sees the plain value.
/// For |x| < 10 (non-terminating series) the value is continued inward from
/// |x| = 20 through the Riccati equation.
inline cplx hquot(double n, BranchedArg x) {
  const double pi = std::numbers::pi;
  if (!(x.arg > -2.0 * pi && x.arg < pi)) throw DomainError("hquot: arg x must lie in (-2pi, pi)");
  if (x.modulus() >= kHankelMinModulus || detail::hankel_terminates(n)) return detail::hquot_series(n, x);
  if (!(x.modulus() > 0.0)) throw DomainError("hquot: x must be nonzero");
  return detail::hquot_continued(n, x);
}

namespace detail {

// J'_n/J_n = (1/x) sum (n+2k) t_k / sum t_k,  t_k = (-x^2/4)^k / (k! (n+1)_k).
inline cplx jquot_ascending(double n, cplx x) {
  const cplx quarter = -0.25 * x * x;
  cplx term = 1.0;
  cplx value = 1.0;
  cplx derivative = n;
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    const double poch = n + k;
    if (std::abs(poch) < kPoleTolerance) throw PoleError("jquot: Pochhammer factor vanishes");
    term *= quarter / (static_cast<double>(k) * poch);
    value += term;
    derivative += (n + 2.0 * k) * term;
    if (k > std::abs(x) && std::abs(term * (n + 2.0 * k)) < 1e-17 * std::abs(derivative) &&
        std::abs(term) < 1e-17 * std::abs(value)) {
      if (std::abs(value) < 1e-12) throw NearZeroError("jquot: J_n(x) vanishes to working precision");
      return derivative / (x * value);
    }
  }
  throw ConvergenceError("jquot: ascending series did not converge");
}

}  // namespace detail

/// J'_n(x)/J_n(x) = (-R sin chi - S cos chi)/(P cos chi - Q sin chi),
/// chi = x - (2n+1) pi/4, rewritten in w = e^{-2i chi} (or 1/w when |w| > 1)
/// so that no growing exponential is formed.
/// Below |x| = 10 the ascending series is summed directly instead.
inline cplx jquot(double n, cplx x) {
  const double pi = std::numbers::pi;
  const auto bx = BranchedArg::from_complex(x);
  if (!(bx.arg > -pi && bx.arg < pi)) throw DomainError("jquot: arg x must lie in (-pi, pi)");
  if (std::abs(x) < kHankelMinModulus) return detail::jquot_ascending(n, x);
  const auto h = hankel_series(n, bx);
  const cplx i{0.0, 1.0};
  const cplx chi = x - (2.0 * n + 1.0) * pi / 4.0;
  cplx num;
  cplx den;
  if (chi.imag() <= 0.0) {
    const cplx w = std::exp(-2.0 * i * chi);
    num = i * h.r * (1.0 - w) - h.s * (1.0 + w);
    den = h.p * (1.0 + w) + i * h.q * (1.0 - w);
  } else {
    const cplx w = std::exp(2.0 * i * chi);
    num = i * h.r * (w - 1.0) - h.s * (w + 1.0);
    den = h.p * (w + 1.0) + i * h.q * (w - 1.0);
  }
  if (std::abs(den) < 1e-14 * (std::abs(h.p) + std::abs(h.q))) {
    throw NearZeroError("jquot: J_n(x) vanishes to working precision");
  }
  return num / den;
}

}  // namespace cuspres
