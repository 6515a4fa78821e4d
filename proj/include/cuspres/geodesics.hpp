#pragma once

// Geodesic flow on dr^2 + f(r)^2 dtheta^2 with the cone/cusp profile
//   f(r) = 1 + a r  (r <= 0),   f(r) = e^{-b r}  (r > 0),   a < 0 < b.
// Integrated in Clairaut-reduced form: L = f^2 theta' is a constant of the
// state, r'' = L^2 f'(r) / f(r)^3 and theta' = L / f(r)^2.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "cuspres/errors.hpp"

namespace cuspres {

class MetricProfile {
 public:
  MetricProfile(double a, double b) : a_(a), b_(b) {
    if (!(a < 0.0 && b > 0.0)) throw ConfigError("MetricProfile requires a<0<b");
  }
  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double b() const { return b_; }
  /// f is C^{1,1} exactly when the one-sided slopes a and -b agree.
  [[nodiscard]] bool matched() const { return a_ + b_ == 0.0; }

 private:
  double a_;
  double b_;
};

enum class ProfileSide { Left, Right };

struct ProfileValue {
  double f;
  double f_prime;
  ProfileSide side;  // which piece supplied f'; r = 0 reports the left limit
};

namespace detail {

inline ProfileValue profile_on(double r, const MetricProfile& p, ProfileSide side) {
  if (side == ProfileSide::Right) {
    const double f = std::exp(-p.b() * r);
    return {f, -p.b() * f, ProfileSide::Right};
  }
  return {1.0 + p.a() * r, p.a(), ProfileSide::Left};
}

}  // namespace detail

inline ProfileValue profile(double r, const MetricProfile& p) {
  return detail::profile_on(r, p, r > 0.0 ? ProfileSide::Right : ProfileSide::Left);
}

struct GeodesicState {
  double r = 0.0;
  double theta = 0.0;
  double r_dot = 0.0;
  double theta_dot = 0.0;
  double clairaut = 0.0;  // L = f(r)^2 theta'
  double speed = 1.0;     // r'^2 + f^2 theta'^2

  /// Unit-speed launch at radius r0 with angle `launch` from the +r direction.
  static GeodesicState launch(double r0, double launch, const MetricProfile& p, double theta0 = 0.0) {
    const double f = profile(r0, p).f;
    GeodesicState s;
    s.r = r0;
    s.theta = theta0;
    s.r_dot = std::cos(launch);
    s.clairaut = f * std::sin(launch);
    s.theta_dot = s.clairaut / (f * f);
    s.speed = s.r_dot * s.r_dot + s.clairaut * s.clairaut / (f * f);
    return s;
  }

  /// Second derivative of r at this state.
  [[nodiscard]] double r_ddot(const MetricProfile& p) const {
    const auto pv = detail::profile_on(r, p, side());
    return clairaut * clairaut * pv.f_prime / (pv.f * pv.f * pv.f);
  }

  /// Piece governing the motion: sign of r, or direction of travel at r = 0.
  [[nodiscard]] ProfileSide side() const {
    if (r > 0.0 || (r == 0.0 && r_dot > 0.0)) return ProfileSide::Right;
    return ProfileSide::Left;
  }
};

namespace detail {

struct Phase {
  double r, r_dot, theta;
};

inline Phase rk4(const Phase& y, double dt, double L, const MetricProfile& p, ProfileSide side) {
  const auto rhs = [&](const Phase& s) {
    // Stages stay on the starting piece; crossings are split out beforehand.
    const auto pv = profile_on(s.r, p, side);
    return Phase{s.r_dot, L * L * pv.f_prime / (pv.f * pv.f * pv.f), L / (pv.f * pv.f)};
  };
  const auto add = [](const Phase& a, const Phase& k, double h) {
    return Phase{a.r + h * k.r, a.r_dot + h * k.r_dot, a.theta + h * k.theta};
  };
  const Phase k1 = rhs(y);
  const Phase k2 = rhs(add(y, k1, 0.5 * dt));
  const Phase k3 = rhs(add(y, k2, 0.5 * dt));
  const Phase k4 = rhs(add(y, k3, dt));
  return {y.r + dt / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
          y.r_dot + dt / 6.0 * (k1.r_dot + 2.0 * k2.r_dot + 2.0 * k3.r_dot + k4.r_dot),
          y.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta)};
}

inline GeodesicState finish(const Phase& y, double L, const MetricProfile& p) {
  GeodesicState s;
  s.r = y.r;
  s.theta = y.theta;
  s.r_dot = y.r_dot;
  s.clairaut = L;
  const double f = profile(y.r, p).f;
  s.theta_dot = L / (f * f);
  s.speed = y.r_dot * y.r_dot + L * L / (f * f);
  return s;
}

}  // namespace detail

/// One explicit 4th-order step of length dt (|dt| <= 1e-2; negative dt
/// integrates backward). A crossing of r = 0 is located by bisection to 1e-12
/// in time and the step is split there.
inline GeodesicState step(const GeodesicState& state, double dt, const MetricProfile& p) {
  if (std::abs(dt) > 1e-2) throw DomainError("step: |dt| must not exceed 1e-2");
  const double L = state.clairaut;
  const detail::Phase start{state.r, state.r_dot, state.theta};
  const double travel = dt >= 0.0 ? state.r_dot : -state.r_dot;
  const ProfileSide side =
      (state.r > 0.0 || (state.r == 0.0 && travel > 0.0)) ? ProfileSide::Right : ProfileSide::Left;
  detail::Phase end = detail::rk4(start, dt, L, p, side);

  const bool crosses = (side == ProfileSide::Right) ? end.r <= 0.0 : end.r > 0.0;
  if (crosses && state.r != 0.0) {
    double lo = 0.0;
    double hi = dt;
    while (std::abs(hi - lo) > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      const double r_mid = detail::rk4(start, mid, L, p, side).r;
      const bool mid_crossed = (side == ProfileSide::Right) ? r_mid <= 0.0 : r_mid > 0.0;
      (mid_crossed ? hi : lo) = mid;
    }
    detail::Phase at_interface = detail::rk4(start, hi, L, p, side);
    at_interface.r = 0.0;
    const ProfileSide other = side == ProfileSide::Right ? ProfileSide::Left : ProfileSide::Right;
    end = detail::rk4(at_interface, dt - hi, L, p, other);
  } else if (crosses) {
    // Started on the interface and moved against the assumed side.
    const ProfileSide other = side == ProfileSide::Right ? ProfileSide::Left : ProfileSide::Right;
    end = detail::rk4(start, dt, L, p, other);
  }

  GeodesicState next = detail::finish(end, L, p);
  if (std::abs(next.speed - state.speed) > 1e-10) {
    throw NumericError("step: speed drift in one step exceeds 1e-10; reduce dt");
  }
  return next;
}

struct TrajectoryOutcome {
  bool escaped = false;
  bool failed = false;
  double escape_time = 0.0;
  double max_speed_drift = 0.0;      // max |speed - speed0|
  double max_clairaut_drift = 0.0;   // max |f^2 theta' - L0|
  double max_r_ddot = -1e300;        // largest r'' seen at accepted steps
  GeodesicState final_state;
  std::string error;
};

/// Integrates until |r| > r_escape or t > t_max.
inline TrajectoryOutcome integrate_until_escape(GeodesicState state, const MetricProfile& p, double t_max,
                                                double r_escape, double dt) {
  TrajectoryOutcome out;
  const double speed0 = state.speed;
  const double clairaut0 = state.clairaut;
  double t = 0.0;
  try {
    while (t < t_max) {
      if (std::abs(state.r) > r_escape) {
        out.escaped = true;
        out.escape_time = t;
        break;
      }
      state = step(state, dt, p);
      t += dt;
      const double f = profile(state.r, p).f;
      out.max_speed_drift = std::max(out.max_speed_drift, std::abs(state.speed - speed0));
      out.max_clairaut_drift = std::max(out.max_clairaut_drift, std::abs(f * f * state.theta_dot - clairaut0));
      out.max_r_ddot = std::max(out.max_r_ddot, state.r_ddot(p));
    }
    if (!out.escaped && std::abs(state.r) > r_escape) {
      out.escaped = true;
      out.escape_time = t;
    }
  } catch (const NumericError& err) {
    out.failed = true;
    out.error = err.what();
  }
  out.final_state = state;
  return out;
}

struct NontrapReport {
  int total = 0;
  int escaped = 0;
  int failed = 0;
  double fraction_escaped = 0.0;
  double worst_escape_time = 0.0;
  double max_speed_drift_rate = 0.0;     // per unit time
  double max_clairaut_drift_rate = 0.0;  // per unit time
  double max_r_ddot = -1e300;
  std::vector<std::string> errors;
};

struct ScanGrid {
  int n_angles = 36;
  int n_radii = 17;
  double r_min = -5.0;
  double r_max = 3.0;
  double t_max = 200.0;
  double r_escape = 20.0;
  double dt = 5e-3;
};

/// Launches unit-speed geodesics from an (angle, radius) grid: angles
/// pi i / n_angles in [0, pi), radii evenly spaced over [r_min, r_max].
inline NontrapReport nontrap_scan(const MetricProfile& p, const ScanGrid& grid, unsigned threads = 1) {
  if (grid.n_angles < 1 || grid.n_radii < 1) throw ConfigError("nontrap_scan: grid must be nonempty");
  struct Launch {
    double r0, angle;
  };
  std::vector<Launch> launches;
  for (int ir = 0; ir < grid.n_radii; ++ir) {
    const double r0 = grid.n_radii == 1 ? grid.r_min
                                        : grid.r_min + (grid.r_max - grid.r_min) * ir / (grid.n_radii - 1);
    for (int ia = 0; ia < grid.n_angles; ++ia) {
      launches.push_back({r0, std::numbers::pi * ia / grid.n_angles});
    }
  }
  std::vector<TrajectoryOutcome> outcomes(launches.size());
  const auto run = [&](std::size_t idx) {
    const auto state = GeodesicState::launch(launches[idx].r0, launches[idx].angle, p);
    outcomes[idx] = integrate_until_escape(state, p, grid.t_max, grid.r_escape, grid.dt);
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1) {
    for (std::size_t idx = 0; idx < launches.size(); ++idx) run(idx);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t idx = t; idx < launches.size(); idx += threads) run(idx);
      });
    }
  }

  NontrapReport report;
  report.total = static_cast<int>(launches.size());
  for (const auto& o : outcomes) {
    if (o.failed) {
      ++report.failed;
      report.errors.push_back(o.error);
      continue;
    }
    const double elapsed = o.escaped ? o.escape_time : grid.t_max;
    const double unit = std::max(elapsed, 1.0);
    report.max_speed_drift_rate = std::max(report.max_speed_drift_rate, o.max_speed_drift / unit);
    report.max_clairaut_drift_rate = std::max(report.max_clairaut_drift_rate, o.max_clairaut_drift / unit);
    report.max_r_ddot = std::max(report.max_r_ddot, o.max_r_ddot);
    if (o.escaped) {
      ++report.escaped;
      report.worst_escape_time = std::max(report.worst_escape_time, o.escape_time);
    }
  }
  report.fraction_escaped = static_cast<double>(report.escaped) / report.total;
  return report;
}

}  // namespace cuspres
