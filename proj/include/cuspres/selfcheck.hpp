#pragma once

// Invariant suite behind `cuspres selfcheck`: every module's properties on
// reduced grids. Each invariant returns pass/fail plus a one-line detail.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cuspres/asymptotics.hpp"
#include "cuspres/bessel.hpp"
#include "cuspres/checks.hpp"
#include "cuspres/complexfn.hpp"
#include "cuspres/geodesics.hpp"
#include "cuspres/resonance.hpp"

namespace cuspres::selfcheck {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Invariant {
  std::string name;
  std::function<Outcome()> run;
};

namespace detail {

inline std::string fmt(const char* format, double value) {
  char buf[96];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

inline Outcome worst_below(double worst, double limit, const char* label) {
  return {worst < limit, fmt((std::string(label) + " = %.3e").c_str(), worst)};
}

// Runs `body`; a numeric exception counts as a failure with its message.
inline Outcome guarded(const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const std::exception& err) {
    return {false, std::string("exception: ") + err.what()};
  }
}

inline Outcome log_gamma_recurrence() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(0.5, 50.0), im(-500.0, 500.0);
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) {
    const cplx z{re(rng), im(rng)};
    // exp(lg(z+1)) / (z exp(lg(z))) - 1, formed in log space to avoid overflow.
    const cplx diff = log_gamma(z + 1.0) - log_gamma(z) - std::log(z);
    worst = std::max(worst, std::abs(std::exp(cplx{0.0, diff.imag()} + diff.real()) - 1.0));
  }
  return worst_below(worst, 1e-10, "max rel error");
}

inline Outcome log_gamma_reflection() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-5.0, 5.0), im(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) {
    const cplx z{re(rng), im(rng)};
    if (std::abs(z - std::round(z.real())) < 0.1) continue;
    const cplx lhs = std::exp(log_gamma(z) + log_gamma(1.0 - z));
    const cplx rhs = std::numbers::pi / std::sin(std::numbers::pi * z);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return worst_below(worst, 1e-9, "max rel error");
}

inline Outcome lambert_round_trip() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) {
    const double re = std::exp(1.0 + unit(rng) * (std::log(1e6) - 1.0));
    const cplx zeta{re, (2.0 * unit(rng) - 1.0) * re};
    const cplx nu = solve_nu_log_nu(LambertQuery{zeta});
    worst = std::max(worst, std::abs(nu * std::log(nu) - zeta) / std::abs(zeta));
  }
  return worst_below(worst, 1e-12, "max rel error");
}

inline Outcome lambert_monotone() {
  double previous = 0.0;
  for (double zeta = 10.0; zeta <= 1e6 * 1.0001; zeta *= 10.0) {
    const cplx nu = solve_nu_log_nu(LambertQuery{cplx{zeta}});
    if (nu.imag() != 0.0 || !(nu.real() > previous)) return {false, fmt("failed at zeta = %g", zeta)};
    previous = nu.real();
  }
  return {true, "real and increasing on 10..1e6"};
}

inline Outcome riccati_k() {
  double worst = 0.0;
  for (cplx nu : {cplx{1.0, 1.0}, cplx{10.0, -20.0}, cplx{0.5, -100.0}}) {
    for (double z : {0.5, 1.0, 2.0}) worst = std::max(worst, checks::riccati_k(nu, z).relative());
  }
  return worst_below(worst, 1e-6, "max residual");
}

inline Outcome riccati_h() {
  const double pi = std::numbers::pi;
  double worst = 0.0;
  for (double n : {1.0, 2.0}) {
    for (double modulus : {30.0, 100.0}) {
      for (double arg : {0.0, -0.5 * pi, -1.25 * pi}) {
        worst = std::max(worst, checks::riccati_h(n, BranchedArg::from_polar(modulus, arg)).relative());
      }
    }
  }
  return worst_below(worst, 1e-6, "max residual");
}

inline Outcome riccati_j() {
  double worst = 0.0;
  for (double n : {1.0, 2.0}) {
    for (cplx x : {cplx{20.0, 0.0}, cplx{20.0, -3.0}, cplx{100.0, -3.0}}) {
      worst = std::max(worst, checks::riccati_j(n, x).relative());
    }
  }
  return worst_below(worst, 1e-6, "max residual");
}

inline Outcome remainder_difference_law() {
  double worst_ratio = 0.0;
  for (double z : {0.5, 1.0, 2.0}) {
    for (double modulus : {10.0, 100.0, 1000.0}) {
      for (double angle : {-0.25 * std::numbers::pi, -0.5 * std::numbers::pi, -1.3}) {
        const cplx nu = std::polar(modulus, angle);
        const auto rem = remainders(nu, z);
        const double gap = std::abs(rem.one_plus_r1 - rem.one_plus_r3 + z * z / (2.0 * nu * nu));
        worst_ratio = std::max(worst_ratio, gap * std::pow(modulus, 3) / (10.0 * std::pow(z, 4)));
      }
    }
  }
  return worst_below(worst_ratio, 1.0, "max |gap| |v|^3 / (10 z^4)");
}

inline Outcome g_modulus_imaginary_order() {
  double worst = 0.0;
  for (double t : {10.0, 100.0, 1000.0}) {
    for (double z : {0.5, 1.0, 2.0}) {
      const cplx nu{0.0, t};
      const double expected = std::abs(std::pow(cplx{0.5 * z}, -2.0 * nu));
      worst = std::max(worst, std::abs(std::abs(g_of_nu(nu, z)) - expected) / expected);
    }
  }
  return worst_below(worst, 1e-10, "max rel error");
}

inline Outcome nu_of_lambda_branches() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int k = 0; k < 10; ++k) {
      const cplx lambda{1.0 + 499.0 * i / 9.0, -5.0 + 10.0 * k / 9.0};
      for (double b : {1.0, 2.0, -1.0}) {
        const auto cusp = nu_of_lambda(lambda, std::abs(b), NuBranch::CuspBranch).nu;
        const auto funnel = nu_of_lambda(lambda, b, NuBranch::FunnelBranch).nu;
        for (cplx nu : {cusp, funnel}) {
          const cplx expected = 0.25 - lambda * lambda / (b * b);
          worst = std::max(worst, std::abs(nu * nu - expected) / std::abs(expected));
        }
        if (std::abs(cusp + funnel) > 1e-12 * std::abs(cusp) && b > 0.0) {
          return {false, "cusp and funnel branches are not negatives"};
        }
        if (lambda.real() > 10.0 && !(cusp.imag() < 0.0)) return {false, "cusp branch: Im v not negative"};
      }
    }
  }
  return worst_below(worst, 1e-12, "max rel error of v^2");
}

inline Outcome seed_trend() {
  const auto prob = ModeProblem::cusp(-1.0, 1.0, 1.0);
  const auto ratio = [&](int k) { return seed_cusp(k, prob).lambda0.real() / predicted_cusp(k, prob).first; };
  const double r2 = ratio(100);
  const double r6 = ratio(1000000);
  return {std::abs(r6 - 1.0) < std::abs(r2 - 1.0), fmt("|ratio-1| at k=1e6: %.4f", std::abs(r6 - 1.0))};
}

inline Outcome zero_free_upper_half_plane() {
  double smallest = 1e300;
  for (auto [a, b] : {std::pair{-1.0, 1.0}, {-2.0, 1.0}, {-1.0, 2.0}, {-2.0, 2.0}}) {
    const auto prob = ModeProblem::cusp(a, b, 1.0);
    for (int i = 0; i < 8; ++i) {
      for (int k = 0; k < 8; ++k) {
        const cplx lambda{1.0 + 99.0 * i / 7.0, 0.5 + 9.5 * k / 7.0};
        smallest = std::min(smallest, std::abs(residual_cusp(lambda, prob)));
      }
    }
  }
  return {smallest > 1e-3, fmt("min |residual| = %.3e", smallest)};
}

inline Outcome root_verification() {
  double worst = 0.0;
  for (const auto& prob : {ModeProblem::cusp(-1.0, 1.0, 1.0), ModeProblem::funnel(1.0, -1.0, 1.0)}) {
    const auto run = enumerate(prob, 10, 100, 30, SolverConfig{});
    if (!run.complete()) return {false, "enumeration failed at k = " + std::to_string(run.failures.front().k)};
    for (const auto& root : run.resonances) worst = std::max(worst, verify_root(root, prob));
  }
  return worst_below(worst, 1e-10, "max relative residual");
}

inline Outcome seed_proximity() {
  const auto prob = ModeProblem::cusp(-1.0, 1.0, 1.0);
  double worst = 0.0;
  for (int k : {10, 40, 100}) {
    const auto root = solve_index(k, prob, SolverConfig{});
    const double bound = std::numbers::pi * prob.b() / (2.0 * std::log(static_cast<double>(k)));
    worst = std::max(worst, std::abs(root.lambda - seed_cusp(k, prob).lambda0) / bound);
  }
  return worst_below(worst, 1.0, "max |lambda - seed| / (pi b / 2 log k)");
}

inline Outcome geodesic_conservation() {
  const MetricProfile p(-1.0, 1.0);
  ScanGrid grid;
  grid.n_angles = 6;
  grid.n_radii = 4;
  const auto report = nontrap_scan(p, grid);
  const double worst = std::max(report.max_speed_drift_rate, report.max_clairaut_drift_rate);
  if (report.failed > 0) return {false, report.errors.front()};
  return worst_below(worst, 1e-8, "max drift per unit time");
}

inline Outcome geodesic_concavity() {
  const MetricProfile p(-2.0, 1.0);
  double worst = -1e300;
  for (double angle : {0.3, 1.0, 1.5, 2.5}) {
    const auto out = integrate_until_escape(GeodesicState::launch(-0.5, angle, p), p, 50.0, 20.0, 5e-3);
    if (out.failed) return {false, out.error};
    worst = std::max(worst, out.max_r_ddot);
  }
  return {worst <= 1e-12, fmt("max r'' = %.3e", worst)};
}

inline Outcome geodesic_time_reversal() {
  const MetricProfile p(-1.0, 1.0);
  double worst = 0.0;
  for (double angle : {0.4, 1.2, 2.2}) {
    const auto start = GeodesicState::launch(0.7, angle, p);
    auto state = start;
    for (int i = 0; i < 1000; ++i) state = step(state, 5e-3, p);
    for (int i = 0; i < 1000; ++i) state = step(state, -5e-3, p);
    worst = std::max({worst, std::abs(state.r - start.r), std::abs(state.theta - start.theta),
                      std::abs(state.r_dot - start.r_dot)});
  }
  return worst_below(worst, 1e-6, "max component error");
}

}  // namespace detail

/// The full suite, in execution order.
inline std::vector<Invariant> invariants() {
  using namespace detail;
  const auto wrap = [](Outcome (*fn)()) { return [fn] { return guarded(fn); }; };
  return {
      {"complexfn.log_gamma_recurrence", wrap(log_gamma_recurrence)},
      {"complexfn.log_gamma_reflection", wrap(log_gamma_reflection)},
      {"complexfn.lambert_round_trip", wrap(lambert_round_trip)},
      {"complexfn.lambert_monotone", wrap(lambert_monotone)},
      {"bessel.riccati_k", wrap(riccati_k)},
      {"bessel.riccati_hankel", wrap(riccati_h)},
      {"bessel.riccati_j", wrap(riccati_j)},
      {"bessel.remainder_difference_law", wrap(remainder_difference_law)},
      {"bessel.g_modulus_imaginary_order", wrap(g_modulus_imaginary_order)},
      {"asymptotics.nu_of_lambda_branches", wrap(nu_of_lambda_branches)},
      {"asymptotics.seed_trend", wrap(seed_trend)},
      {"resonance.zero_free_upper_half_plane", wrap(zero_free_upper_half_plane)},
      {"resonance.root_verification", wrap(root_verification)},
      {"resonance.seed_proximity", wrap(seed_proximity)},
      {"geodesics.conservation", wrap(geodesic_conservation)},
      {"geodesics.concavity", wrap(geodesic_concavity)},
      {"geodesics.time_reversal", wrap(geodesic_time_reversal)},
  };
}

}  // namespace cuspres::selfcheck
