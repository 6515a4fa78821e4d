#pragma once

// Spectral parameter v(lambda), Lambert-W seeds for both geometries, the
// leading-order resonance laws and Weyl counting.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <utility>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cuspres/complexfn.hpp"
#include "cuspres/errors.hpp"
#include "cuspres/problem.hpp"

namespace cuspres {

enum class NuBranch { CuspBranch, FunnelBranch };

struct NuValue {
  cplx nu;
  NuBranch branch;
};

struct SeedResult {
  cplx lambda0;
  cplx nu_tilde;
  cplx zeta;
};

/// v = sqrt(1/4 - lambda^2/b^2) on the branch used by each geometry:
///   cusp:   v = -i w sqrt(1 - 1/(4w^2)),  w = lambda/b   (v ~ -i lambda/b)
///   funnel: v = +i w sqrt(1 - 1/(4w^2))                   (v ~ +i lambda/b)
/// Both are analytic off the segment between the branch points +-b/2.
inline NuValue nu_of_lambda(cplx lambda, double b, NuBranch branch) {
  if (b == 0.0) throw DomainError("nu_of_lambda: b must be nonzero");
  if (std::abs(lambda - 0.5 * b) < kPoleTolerance || std::abs(lambda + 0.5 * b) < kPoleTolerance) {
    throw DomainError("nu_of_lambda: lambda at a branch point +-b/2");
  }
  if (lambda == cplx{0.0}) return {cplx{0.5}, branch};
  const cplx w = lambda / b;
  const cplx i{0.0, 1.0};
  const cplx root = w * std::sqrt(1.0 - 0.25 / (w * w));
  return {branch == NuBranch::CuspBranch ? -i * root : i * root, branch};
}

/// Leading-order cusp seed: zeta = 2 pi k/(e z), v~ = solve(v~ log v~ = zeta),
/// lambda0 = (b e z v~ - i b j)/2.
inline SeedResult seed_cusp(int k, const ModeProblem& prob) {
  if (prob.kind() != ProblemKind::CuspCone) throw ConfigError("seed_cusp: CuspCone problem required");
  if (k < 10) throw DomainError("seed_cusp: k must be at least 10");
  const double e = std::numbers::e;
  const double z = prob.z();
  const cplx zeta{2.0 * std::numbers::pi * k / (e * z), 0.0};
  const cplx nu_tilde = solve_nu_log_nu(LambertQuery{zeta});
  const double b = prob.b();
  const cplx lambda0{0.5 * b * e * z * nu_tilde.real(), -0.5 * b * prob.j()};
  return {lambda0, nu_tilde, zeta};
}

/// Seed with the bounded constant of the reduced equation restored:
///   v~ log v~ = 2 pi k/(e z) + delta,
///   delta = [i log(-c0) + i j (1 - log(e z/2)) - pi (j+1)/2] / (e z),
/// with c0 = (a+b)/(4b) for j = 1 and 1/8 for j = 2 (the limit of
/// g(v) v^j on the resonance curve). The real part of delta is reduced into
/// (-1/2, 1/2] of a spacing so the index stays that of seed_cusp.
inline SeedResult refined_seed_cusp(int k, const ModeProblem& prob) {
  if (prob.kind() != ProblemKind::CuspCone) throw ConfigError("refined_seed_cusp: CuspCone problem required");
  if (k < 10) throw DomainError("refined_seed_cusp: k must be at least 10");
  const double pi = std::numbers::pi;
  const double e = std::numbers::e;
  const double z = prob.z();
  const int j = prob.j();
  const double c0 = j == 1 ? (prob.a() + prob.b()) / (4.0 * prob.b()) : 0.125;
  const cplx i{0.0, 1.0};
  const cplx log_minus_c0 = std::log(cplx{-c0, 0.0});
  const cplx scaled = i * log_minus_c0 + i * static_cast<double>(j) * (1.0 - std::log(0.5 * e * z)) -
                      0.5 * pi * (j + 1);
  // Reduce the real part modulo 2 pi into (-pi, pi].
  double re = std::remainder(scaled.real(), 2.0 * pi);
  if (re <= -pi) re += 2.0 * pi;
  const cplx delta = cplx{re, scaled.imag()} / (e * z);
  const cplx zeta = 2.0 * pi * k / (e * z) + delta;
  const cplx nu_tilde = solve_nu_log_nu(LambertQuery{zeta});
  const double b = prob.b();
  const cplx lambda0 = 0.5 * b * e * z * nu_tilde - 0.5 * i * b * static_cast<double>(j);
  return {lambda0, nu_tilde, zeta};
}

/// Leading-order funnel seed pi a k - (i j a/2) log k.
inline cplx seed_funnel(int k, const ModeProblem& prob) {
  if (prob.kind() != ProblemKind::FunnelCone) throw ConfigError("seed_funnel: FunnelCone problem required");
  if (k < 10) throw DomainError("seed_funnel: k must be at least 10");
  const double a = prob.a();
  return {std::numbers::pi * a * k, -0.5 * prob.j() * a * std::log(static_cast<double>(k))};
}

/// Funnel seed with the O(1) constant restored: the fixed point of
///   lambda = pi a k + pi m/2 + pi a/4 + (i a/2) log c0 - (i j a/2) log lambda,
/// c0 = i(a+b)/4 (j = 1) or a^2/8 (j = 2), with the real offset reduced into
/// (-pi a/2, pi a/2] so the index stays that of seed_funnel.
inline cplx refined_seed_funnel(int k, const ModeProblem& prob) {
  if (prob.kind() != ProblemKind::FunnelCone) throw ConfigError("refined_seed_funnel: FunnelCone problem required");
  if (k < 10) throw DomainError("refined_seed_funnel: k must be at least 10");
  const double pi = std::numbers::pi;
  const double a = prob.a();
  const double j = prob.j();
  const cplx i{0.0, 1.0};
  const cplx c0 = prob.j() == 1 ? i * (a + prob.b()) / 4.0 : cplx{a * a / 8.0};
  const cplx constant = pi * prob.m() / 2.0 + pi * a / 4.0 + 0.5 * i * a * std::log(c0);
  double offset = std::remainder(constant.real(), pi * a);
  if (offset <= -0.5 * pi * a) offset += pi * a;
  const cplx base = pi * a * k + cplx{offset, constant.imag()};
  cplx lambda = base;
  for (int iter = 0; iter < 20; ++iter) lambda = base - 0.5 * i * j * a * std::log(lambda);
  return lambda;
}

/// (pi b k / log k, -b j/2).
inline std::pair<double, double> predicted_cusp(int k, const ModeProblem& prob) {
  if (k < 3) throw DomainError("predicted_cusp: k must be at least 3");
  const double b = prob.b();
  return {std::numbers::pi * b * k / std::log(static_cast<double>(k)), -0.5 * b * prob.j()};
}

/// Number of resonances with Re lambda_k <= lambda; input sorted by Re lambda.
inline std::size_t weyl_count(std::span<const Resonance> resonances, double lambda) {
  const auto it = std::upper_bound(resonances.begin(), resonances.end(), lambda,
                                   [](double value, const Resonance& r) { return value < r.lambda.real(); });
  return static_cast<std::size_t>(it - resonances.begin());
}

/// lambda log lambda / (pi b).
inline double weyl_model(double lambda, double b) {
  if (!(lambda > std::numbers::e * (1.0 - 1e-15))) throw DomainError("weyl_model: lambda must exceed e");
  if (!(b > 0.0)) throw DomainError("weyl_model: b must be positive");
  return lambda * std::log(lambda) / (std::numbers::pi * b);
}

/// (1/2pi) Vol{rho, r >= 0 : rho^2 + m^2 e^{2br} <= lambda^2}
///   = (1/pi) int_0^{r*} sqrt(lambda^2 - m^2 e^{2br}) dr,  r* = log(lambda/m)/b.
inline double phase_volume(double lambda, double m, double b) {
  if (!(lambda > 0.0 && m > 0.0 && b > 0.0)) throw DomainError("phase_volume: arguments must be positive");
  if (lambda < m) throw DomainError("phase_volume: empty region (lambda < m)");
  if (lambda == m) return 0.0;
  const double r_star = std::log(lambda / m) / b;
  const auto integrand = [&](double r) {
    const double ratio = (m / lambda) * std::exp(b * r);
    return lambda * std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double value = integrator.integrate(integrand, 0.0, r_star, 1e-12);
  return value / std::numbers::pi;
}

}  // namespace cuspres
