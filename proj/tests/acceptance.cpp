// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "cuspres/checks.hpp"
#include "cuspres/commands.hpp"
#include "cuspres/geodesics.hpp"
#include "cuspres/resonance.hpp"
#include "oracles.hpp"

using namespace cuspres;

namespace {

constexpr double pi = std::numbers::pi;
const std::pair<double, double> kSets[] = {{-1.0, 1.0}, {-2.0, 1.0}, {-1.0, 2.0}, {-2.0, 2.0}};

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::map<std::pair<double, double>, Enumeration> g_runs;

Verdict figure_runs() {
  Verdict v;
  std::ostringstream d;
  double worst_residual = 0.0;
  for (auto [a, b] : kSets) {
    const auto prob = ModeProblem::cusp(a, b, 1.0);
    const auto& run = g_runs[{a, b}] = enumerate(prob, 10, 1000, 10, SolverConfig{}, 0);
    if (!run.complete() || run.resonances.size() != 100) {
      v.pass = false;
      d << "(" << a << "," << b << ") incomplete; ";
      continue;
    }
    for (const auto& r : run.resonances) worst_residual = std::max(worst_residual, r.residual);
    const double limit = -0.5 * b * prob.j();
    const double gap100 = std::abs(run.resonances[9].lambda.imag() - limit);
    const double gap1000 = std::abs(run.resonances[99].lambda.imag() - limit);
    const bool ok = gap1000 < 0.35 && gap1000 < gap100;
    v.pass = v.pass && ok;
    d << "(" << a << "," << b << ") Im@1000=" << fmt(run.resonances[99].lambda.imag()) << " limit " << limit
      << (ok ? "" : " [bad]") << "; ";
  }
  v.pass = v.pass && worst_residual < 1e-10;
  d << "max residual " << fmt(worst_residual);
  v.detail = d.str();
  return v;
}

Verdict real_part_law() {
  const auto& run = g_runs[{-1.0, 1.0}];
  Verdict v;
  double lo = 1e9, hi = 0.0, at100 = 0.0, at1000 = 0.0;
  for (const auto& r : run.resonances) {
    if (r.k < 100) continue;
    const double ratio = r.lambda.real() / (pi * r.k / std::log(static_cast<double>(r.k)));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (r.k == 100) at100 = ratio;
    if (r.k == 1000) at1000 = ratio;
  }
  v.pass = run.resonances.size() == 100 && lo >= 0.8 && hi <= 1.25 && std::abs(at1000 - 1) < std::abs(at100 - 1);
  v.detail = "ratio range [" + fmt(lo) + ", " + fmt(hi) + "], k=100 " + fmt(at100) + ", k=1000 " + fmt(at1000);
  return v;
}

Verdict funnel_law() {
  Verdict v;
  std::ostringstream d;
  for (double b : {-1.0, -2.0}) {
    const auto prob = ModeProblem::funnel(1.0, b, 1.0);
    const auto run = enumerate(prob, 10, 1000, 10, SolverConfig{}, 0);
    double half = 0.0, full = 0.0;
    for (const auto& r : run.resonances) {
      const double dist = std::abs(r.lambda - seed_funnel(r.k, prob));
      full = std::max(full, dist);
      if (r.k <= 500) half = std::max(half, dist);
    }
    const bool ok = run.complete() && run.resonances.size() == 100 && full <= 5.0 && full <= half;
    v.pass = v.pass && ok;
    d << "(1," << b << ") max " << fmt(full) << " half-run " << fmt(half) << "; ";
  }
  v.detail = d.str();
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  double worst_k = 0.0, worst_i = 0.0, worst_h = 0.0, worst_j = 0.0, continued = 1.0;
  for (cplx nu : {cplx{1.0, 1.0}, cplx{10.0, -20.0}, cplx{0.5, -100.0}}) {
    for (double z : {0.5, 1.0, 2.0}) {
      const cplx ek = oracle::kquot(nu, z), ei = oracle::iquot(nu, z);
      worst_k = std::max(worst_k, std::abs(kquot(nu, z) - ek) / std::abs(ek));
      worst_i = std::max(worst_i, std::abs(iquot(nu, z) - ei) / std::abs(ei));
    }
  }
  for (double n : {1.0, 2.0}) {
    for (double modulus : {30.0, 100.0, 300.0}) {
      for (double arg : {0.0, -0.5 * pi, -1.25 * pi}) {
        const double r = std::abs(checks::riccati_h(n, BranchedArg::from_polar(modulus, arg)).absolute);
        worst_h = std::max(worst_h, r);
        if (arg < -pi) continued = std::min(continued, r < 1e-6 ? 0.0 : r);
      }
    }
  }
  for (double re : {20.0, 100.0}) {
    for (double im : {0.0, -3.0}) {
      for (double n : {1.0, 2.0}) worst_j = std::max(worst_j, std::abs(checks::riccati_j(n, cplx{re, im}).absolute));
    }
  }
  v.pass = worst_k < 1e-10 && worst_i < 1e-10 && worst_h < 1e-6 && worst_j < 1e-6 && continued == 0.0;
  v.detail = "kquot rel " + fmt(worst_k) + ", iquot rel " + fmt(worst_i) + ", hquot Riccati " + fmt(worst_h) +
             ", jquot Riccati " + fmt(worst_j);
  return v;
}

Verdict zero_free() {
  Verdict v;
  double smallest = 1e300;
  for (auto [a, b] : kSets) {
    const auto prob = ModeProblem::cusp(a, b, 1.0);
    for (int i = 0; i < 20; ++i) {
      for (int k = 0; k < 20; ++k) {
        const cplx lambda{1.0 + 99.0 * i / 19.0, 0.5 + 9.5 * k / 19.0};
        smallest = std::min(smallest, std::abs(residual_cusp(lambda, prob)));
      }
    }
  }
  v.pass = smallest > 1e-3;
  v.detail = "min |F| " + fmt(smallest);
  return v;
}

Verdict lambert() {
  Verdict v;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_round = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double re = std::exp(1.0 + unit(rng) * (std::log(1e6) - 1.0));
    const cplx zeta{re, (2.0 * unit(rng) - 1.0) * re};
    const cplx nu = solve_nu_log_nu(LambertQuery{zeta});
    worst_round = std::max(worst_round, std::abs(nu * std::log(nu) - zeta) / std::abs(zeta));
  }
  bool exact_im = true;
  bool moves_ok = true;
  std::ostringstream moves;
  for (auto [a, b] : kSets) {
    const auto prob = ModeProblem::cusp(a, b, 1.0);
    double worst = 0.0;
    std::string failure;
    for (int k : {10, 100, 1000}) {
      const auto seed = seed_cusp(k, prob);
      exact_im = exact_im && seed.lambda0.imag() == -0.5 * b * prob.j();
      const double spacing = pi * b / std::log(static_cast<double>(k));
      try {
        const auto r = polish([&](cplx l) { return residual_cusp_parts(l, prob); }, seed.lambda0, SolverConfig{},
                              2.0 * spacing);
        worst = std::max(worst, std::abs(r.lambda - seed.lambda0) / (0.5 * spacing));
      } catch (const NumericError& e) {
        if (failure.empty()) failure = "k=" + std::to_string(k) + " " + e.what();
      }
    }
    moves_ok = moves_ok && failure.empty() && worst < 1.0;
    moves << " (" << a << "," << b << ") " << (failure.empty() ? fmt(worst) : failure) << ";";
  }
  v.pass = worst_round < 1e-12 && exact_im && moves_ok;
  v.detail = "round trip " + fmt(worst_round) + ", Im exact " + (exact_im ? "yes" : "no") +
             ", polish move / half spacing:" + moves.str();
  return v;
}

Verdict nontrapping() {
  const auto report = nontrap_scan(MetricProfile(-1.0, 1.0), ScanGrid{}, 0);
  Verdict v;
  v.pass = report.fraction_escaped == 1.0 && report.failed == 0 && report.max_clairaut_drift_rate < 1e-8 &&
           report.max_speed_drift_rate < 1e-8;
  v.detail = "escaped " + std::to_string(report.escaped) + "/" + std::to_string(report.total) + ", drift rates " +
             fmt(report.max_clairaut_drift_rate) + " (Clairaut) " + fmt(report.max_speed_drift_rate) + " (speed)";
  return v;
}

Verdict weyl() {
  const auto prob = ModeProblem::cusp(-1.0, 1.0, 1.0);
  const auto& run = g_runs[{-1.0, 1.0}];
  Verdict v;
  if (run.resonances.empty()) return {false, "no resonances"};
  const auto s = cli::weyl_summary(run.resonances, prob, 10);
  const double ratio = s.rows.back().ratio;
  const double gap = std::abs(s.phase_volume - s.model_at_max);
  v.pass = ratio >= 0.8 && ratio <= 1.2 && gap <= 2.0 * s.lambda_max;
  v.detail = "ratio at lambda=" + fmt(s.lambda_max) + " is " + fmt(ratio) + ", |phase_volume - model| " + fmt(gap);
  return v;
}

std::string capture(const std::string& args) {
  const auto path = std::filesystem::temp_directory_path() / "cuspres_acceptance.csv";
  const std::string cmd = std::string("'") + CUSPRES_BINARY + "' " + args + " >'" + path.string() + "'";
  const int raw = std::system(cmd.c_str());
  if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) return "exit failure";
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  Verdict v;
  std::ostringstream d;
  for (auto [a, b] : kSets) {
    std::ostringstream args;
    args << "resonances --a " << a << " --b " << b << " --m 1 --k 10:1000:10";
    const std::string one = capture(args.str() + " --threads 1");
    const std::string eight = capture(args.str() + " --threads 8");
    const bool same = one == eight && one.size() > 100;
    v.pass = v.pass && same;
    d << "(" << a << "," << b << ") " << (same ? "identical" : "DIFFER") << " " << one.size() << " bytes; ";
  }
  v.detail = d.str();
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"Figure-2 reproduction", figure_runs}, {"real-part law", real_part_law},
      {"funnel law", funnel_law},             {"special-function oracles", oracle_equivalence},
      {"upper half-plane zero-free", zero_free}, {"Lambert machinery", lambert},
      {"nontrapping", nontrapping},           {"Weyl consistency", weyl},
      {"determinism", determinism},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += v.pass ? 0 : 1;
    std::cout << "criterion " << index++ << ": " << (v.pass ? "PASS" : "FAIL") << "  " << name << "  ("
              << fmt(seconds) << " s)  " << v.detail << std::endl;
  }
  std::cout << (failures == 0 ? "acceptance: all criteria passed" : "acceptance: FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
