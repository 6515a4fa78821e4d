#pragma once

// Resonance conditions for the cusp-cone and funnel-cone surfaces, a damped
// Newton polish, and per-index enumeration of resonance sequences.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cuspres/asymptotics.hpp"
#include "cuspres/bessel.hpp"
#include "cuspres/complexfn.hpp"
#include "cuspres/errors.hpp"
#include "cuspres/problem.hpp"

namespace cuspres {

/// Both sides of a resonance condition; the residual is lhs - rhs.
struct ResidualParts {
  cplx lhs;
  cplx rhs;

  [[nodiscard]] cplx value() const { return lhs - rhs; }

  /// |lhs - rhs| / (|lhs| + |rhs|); both sides grow like |v|.
  [[nodiscard]] double relative() const {
    const double scale = std::abs(lhs) + std::abs(rhs);
    return scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  }
};

using ResidualFunction = std::function<ResidualParts(cplx)>;

/// Continued argument of lambda/a for a < 0. The continuation domain
/// {Im lambda > 0} u {|Re lambda| > b/2} maps to arg(lambda/a) in (-3pi/2, pi/2).
inline BranchedArg continued_cusp_argument(cplx lambda, double a) {
  const double pi = std::numbers::pi;
  double arg = std::arg(lambda);
  if (arg < -0.5 * pi) arg += 2.0 * pi;
  return BranchedArg{std::log(std::abs(lambda) / std::abs(a)), arg - pi};
}

/// K'_v(m/b)/K_v(m/b) against lambda H2'_{m/a}(lambda/a) / (m H2_{m/a}(lambda/a)) - b/(2m).
inline ResidualParts residual_cusp_parts(cplx lambda, const ModeProblem& prob,
                                         double series_tol = kSeriesRelTol) {
  if (prob.kind() != ProblemKind::CuspCone) throw ConfigError("residual_cusp: CuspCone problem required");
  const double a = prob.a();
  const double b = prob.b();
  const double m = prob.m();
  if (!(lambda.real() > 0.5 * b || lambda.imag() > 0.0)) {
    throw DomainError("residual_cusp: lambda outside {Re > b/2} u {Im > 0}");
  }
  const cplx nu = nu_of_lambda(lambda, b, NuBranch::CuspBranch).nu;
  const cplx lhs = kquot(nu, prob.z(), series_tol);
  const BranchedArg x = continued_cusp_argument(lambda, a);
  const cplx rhs = lambda * hquot(m / a, x) / m - b / (2.0 * m);
  return {lhs, rhs};
}

inline cplx residual_cusp(cplx lambda, const ModeProblem& prob) {
  return residual_cusp_parts(lambda, prob).value();
}

/// Default lower bound on Re lambda for the funnel condition.
inline double default_funnel_min_re(const ModeProblem& prob) { return 25.0 * prob.a(); }

/// I'_v(m/b)/I_v(m/b) against lambda J'_{m/a}(lambda/a) / (m J_{m/a}(lambda/a)) - b/(2m).
inline ResidualParts residual_funnel_parts(cplx lambda, const ModeProblem& prob,
                                           double series_tol = kSeriesRelTol,
                                           std::optional<double> min_re = std::nullopt) {
  if (prob.kind() != ProblemKind::FunnelCone) throw ConfigError("residual_funnel: FunnelCone problem required");
  const double a = prob.a();
  const double b = prob.b();
  const double m = prob.m();
  const double floor = min_re.value_or(default_funnel_min_re(prob));
  if (lambda.real() < floor) throw DomainError("residual_funnel: Re lambda below the configured floor");
  const cplx nu = nu_of_lambda(lambda, b, NuBranch::FunnelBranch).nu;
  const cplx lhs = iquot(nu, prob.z(), series_tol);
  const cplx rhs = lambda * jquot(m / a, lambda / a) / m - b / (2.0 * m);
  return {lhs, rhs};
}

inline cplx residual_funnel(cplx lambda, const ModeProblem& prob) {
  return residual_funnel_parts(lambda, prob).value();
}

/// Raised when polish gives up; carries the last iterate.
class PolishError : public ConvergenceError {
 public:
  PolishError(const std::string& what, cplx last, int iterations)
      : ConvergenceError(what), last_iterate(last), iterations(iterations) {}
  cplx last_iterate;
  int iterations;
};

struct PolishResult {
  cplx lambda;
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton iteration with a central-difference derivative. Converged
/// when the relative residual drops below cfg.rel_tol. Iterates farther than
/// `radius` from the seed count as divergence.
inline PolishResult polish(const ResidualFunction& residual, cplx seed, const SolverConfig& cfg,
                           double radius = std::numeric_limits<double>::infinity()) {
  cfg.validate();
  cplx lambda = seed;
  for (int iter = 0;; ++iter) {
    ResidualParts parts;
    try {
      parts = residual(lambda);
    } catch (const NumericError& err) {
      throw PolishError(std::string("polish: residual not evaluable: ") + err.what(), lambda, iter);
    }
    const double rel = parts.relative();
    if (rel < cfg.rel_tol) return {lambda, rel, iter};
    if (iter >= cfg.max_iter) throw PolishError("polish: no convergence within max_iter", lambda, iter);

    const double h = cfg.fd_step_scale * (1.0 + std::abs(lambda));
    cplx derivative;
    try {
      derivative = (residual(lambda + h).value() - residual(lambda - h).value()) / (2.0 * h);
    } catch (const NumericError& err) {
      throw PolishError(std::string("polish: derivative not evaluable: ") + err.what(), lambda, iter);
    }
    if (derivative == cplx{0.0} || !std::isfinite(std::abs(derivative))) {
      throw PolishError("polish: degenerate derivative", lambda, iter);
    }
    lambda -= cfg.damping * parts.value() / derivative;
    if (!std::isfinite(std::abs(lambda)) || std::abs(lambda - seed) > radius) {
      throw PolishError("polish: iterate left the evaluability disk", lambda, iter + 1);
    }
  }
}

/// Expected distance between consecutive resonances near index k.
inline double spacing_estimate(int k, const ModeProblem& prob) {
  const double pi = std::numbers::pi;
  if (prob.kind() == ProblemKind::CuspCone) return pi * prob.b() / std::log(static_cast<double>(k));
  return pi * prob.a();
}

/// Raw resonance condition of the problem's geometry.
inline ResidualParts residual_parts(cplx lambda, const ModeProblem& prob, double series_tol = kSeriesRelTol) {
  return prob.kind() == ProblemKind::CuspCone ? residual_cusp_parts(lambda, prob, series_tol)
                                              : residual_funnel_parts(lambda, prob, series_tol);
}

inline cplx polish_seed(int k, const ModeProblem& prob) {
  return prob.kind() == ProblemKind::CuspCone ? refined_seed_cusp(k, prob).lambda0 : refined_seed_funnel(k, prob);
}

struct EnumerationFailure {
  int k = 0;
  std::string reason;
  std::optional<cplx> last_iterate;
};

struct Enumeration {
  std::vector<Resonance> resonances;  // sorted by k
  std::vector<EnumerationFailure> failures;

  [[nodiscard]] bool complete() const { return failures.empty(); }
};

/// Seeds and polishes a single index; throws on failure.
inline Resonance solve_index(int k, const ModeProblem& prob, const SolverConfig& cfg) {
  const cplx seed = polish_seed(k, prob);
  const double spacing = spacing_estimate(k, prob);
  const auto result = polish([&](cplx lambda) { return residual_parts(lambda, prob); }, seed, cfg, 2.0 * spacing);
  if (std::abs(result.lambda - seed) >= 0.5 * spacing) {
    throw PolishError("root jump: converged farther than half a spacing from the seed", result.lambda,
                      result.iterations);
  }
  if (prob.kind() == ProblemKind::CuspCone &&
      !(result.lambda.real() > 0.5 * prob.b() && result.lambda.imag() < 0.0)) {
    throw PolishError("root outside the continuation region {Im < 0, Re > b/2}", result.lambda, result.iterations);
  }
  return {k, result.lambda, result.residual, result.iterations, seed};
}

/// Resonances for k = k_min, k_min + step, ..., k <= k_max. Each index is
/// solved independently; `threads` workers (0 = hardware concurrency) share
/// the work and results are placed by index, so the output does not depend on
/// scheduling.
inline Enumeration enumerate(const ModeProblem& prob, int k_min, int k_max, int step, const SolverConfig& cfg,
                             unsigned threads = 1) {
  cfg.validate();
  if (k_min < 10) throw ConfigError("enumerate: k_min must be at least 10");
  if (step < 1) throw ConfigError("enumerate: step must be at least 1");
  if (k_max < k_min) throw ConfigError("enumerate: k_max must not be below k_min");

  std::vector<int> indices;
  for (int k = k_min; k <= k_max; k += step) indices.push_back(k);

  std::vector<std::optional<Resonance>> solved(indices.size());
  std::vector<std::optional<EnumerationFailure>> failed(indices.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t slot = next++; slot < indices.size(); slot = next++) {
      const int k = indices[slot];
      try {
        solved[slot] = solve_index(k, prob, cfg);
      } catch (const PolishError& err) {
        failed[slot] = EnumerationFailure{k, err.what(), err.last_iterate};
      } catch (const NumericError& err) {
        failed[slot] = EnumerationFailure{k, err.what(), std::nullopt};
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, indices.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  Enumeration out;
  for (std::size_t slot = 0; slot < indices.size(); ++slot) {
    if (failed[slot]) {
      out.failures.push_back(*failed[slot]);
      continue;
    }
    const Resonance& current = *solved[slot];
    if (!out.resonances.empty()) {
      const Resonance& previous = out.resonances.back();
      if (std::abs(current.lambda - previous.lambda) < 1e-6 * (1.0 + std::abs(current.lambda))) {
        out.failures.push_back({current.k, "duplicate root (same as k = " + std::to_string(previous.k) + ")",
                                current.lambda});
        continue;
      }
      if (!(current.lambda.real() > previous.lambda.real())) {
        out.failures.push_back({current.k, "Re lambda not increasing in k", current.lambda});
        continue;
      }
    }
    out.resonances.push_back(current);
  }
  return out;
}

/// Relative residual of the raw condition at a returned root, re-evaluated
/// with a finer series tolerance.
inline double verify_root(const Resonance& root, const ModeProblem& prob) {
  return residual_parts(root.lambda, prob, 0.5 * kSeriesRelTol).relative();
}

}  // namespace cuspres
