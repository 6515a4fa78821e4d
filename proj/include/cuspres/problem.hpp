#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "cuspres/errors.hpp"

namespace cuspres {

enum class ProblemKind { CuspCone, FunnelCone };

inline std::string_view to_string(ProblemKind kind) {
  return kind == ProblemKind::CuspCone ? "cusp-cone" : "funnel-cone";
}

/// One Fourier mode of the cone glued to a cusp (a < 0 < b) or to a funnel
/// (b < 0 < a).
class ModeProblem {
 public:
  ModeProblem(double a, double b, double m, ProblemKind kind) : a_(a), b_(b), m_(m), kind_(kind) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(m)) {
      throw ConfigError("ModeProblem: parameters must be finite");
    }
    if (!(m > 0.0)) throw ConfigError("ModeProblem: m must be positive (m = 0 unsupported)");
    if (kind == ProblemKind::CuspCone && !(a < 0.0 && 0.0 < b)) {
      throw ConfigError("CuspCone requires a<0<b");
    }
    if (kind == ProblemKind::FunnelCone && !(b < 0.0 && 0.0 < a)) {
      throw ConfigError("FunnelCone requires b<0<a");
    }
  }

  static ModeProblem cusp(double a, double b, double m = 1.0) {
    return {a, b, m, ProblemKind::CuspCone};
  }
  static ModeProblem funnel(double a, double b, double m = 1.0) {
    return {a, b, m, ProblemKind::FunnelCone};
  }

  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double b() const { return b_; }
  [[nodiscard]] double m() const { return m_; }
  [[nodiscard]] ProblemKind kind() const { return kind_; }

  /// 2 when the cone and cusp slopes match (a + b == 0 exactly), else 1.
  [[nodiscard]] int j() const { return a_ + b_ == 0.0 ? 2 : 1; }

  [[nodiscard]] double z() const { return m_ / b_; }

  /// a + b is nonzero but so small that the j = 1 regime only appears at
  /// astronomically large index.
  [[nodiscard]] bool nearly_matched() const {
    const double sum = std::abs(a_ + b_);
    return sum > 0.0 && sum < 1e-9 * std::abs(b_);
  }

 private:
  double a_;
  double b_;
  double m_;
  ProblemKind kind_;
};

struct SolverConfig {
  double rel_tol = 1e-10;
  int max_iter = 50;
  double fd_step_scale = 1e-6;
  double damping = 1.0;

  void validate() const {
    if (!(rel_tol > 0.0)) throw ConfigError("SolverConfig: rel_tol must be positive");
    if (max_iter < 1) throw ConfigError("SolverConfig: max_iter must be at least 1");
    if (!(fd_step_scale > 0.0)) throw ConfigError("SolverConfig: fd_step_scale must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("SolverConfig: damping must lie in (0, 1]");
  }
};

struct Resonance {
  int k = 0;
  std::complex<double> lambda;
  double residual = 0.0;
  int iterations = 0;
  std::complex<double> seed;
};

}  // namespace cuspres
