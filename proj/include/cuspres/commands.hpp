#pragma once

// Subcommand bodies for the cuspres CLI. Each writes its table to `out`,
// diagnostics to `err`, and returns the process exit code:
//   0 success, 1 configuration error, 2 partial numerical failure,
//   3 self-check failure.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cuspres/asymptotics.hpp"
#include "cuspres/geodesics.hpp"
#include "cuspres/problem.hpp"
#include "cuspres/report.hpp"
#include "cuspres/resonance.hpp"
#include "cuspres/selfcheck.hpp"

namespace cuspres::cli {

enum class ExitCode : int { Ok = 0, Config = 1, Partial = 2, SelfCheck = 3 };

inline int code(ExitCode c) { return static_cast<int>(c); }

enum class Format { Csv, Json };

inline std::string_view to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

struct KRange {
  int k_min = 10;
  int k_max = 1000;
  int k_step = 10;
};

/// Parses `k_min:k_max[:step]`.
inline KRange parse_range(std::string_view text) {
  std::vector<int> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t colon = text.find(':', pos);
    const std::string_view piece = text.substr(pos, colon == std::string_view::npos ? text.npos : colon - pos);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
    if (piece.empty() || ec != std::errc{} || ptr != piece.data() + piece.size()) {
      throw ConfigError("range must look like k_min:k_max:step, got '" + std::string(text) + "'");
    }
    parts.push_back(value);
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw ConfigError("range must look like k_min:k_max:step, got '" + std::string(text) + "'");
  }
  return {parts[0], parts[1], parts.size() == 3 ? parts[2] : 1};
}

struct RunConfig {
  double a = -1.0;
  double b = 1.0;
  double m = 1.0;
  ProblemKind kind = ProblemKind::CuspCone;
  int k_min = 10;
  int k_max = 1000;
  int k_step = 10;
  double rel_tol = 1e-10;
  Format format = Format::Csv;
  std::optional<std::string> plot_path;
  int threads = 1;  // 0 = hardware concurrency

  /// Throws ConfigError before any computation when the run is ill-posed.
  void validate() const {
    (void)problem();
    solver().validate();
    if (k_min < 10) throw ConfigError("k_min must be at least 10");
    if (k_step < 1) throw ConfigError("k step must be at least 1");
    if (k_max < k_min) throw ConfigError("k_max must not be below k_min");
    if (threads < 0) throw ConfigError("threads must be non-negative");
  }

  [[nodiscard]] ModeProblem problem() const { return ModeProblem(a, b, m, kind); }

  [[nodiscard]] SolverConfig solver() const {
    SolverConfig cfg;
    cfg.rel_tol = rel_tol;
    return cfg;
  }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["a"] = a;
    j["b"] = b;
    j["m"] = m;
    j["kind"] = std::string(cuspres::to_string(kind));
    j["k_min"] = k_min;
    j["k_max"] = k_max;
    j["k_step"] = k_step;
    j["rel_tol"] = rel_tol;
    j["format"] = std::string(to_string(format));
    j["plot_path"] = plot_path ? nlohmann::ordered_json(*plot_path) : nlohmann::ordered_json(nullptr);
    j["threads"] = threads;
    return j;
  }
};

namespace detail {

inline void report_failures(std::ostream& err, const Enumeration& run) {
  for (const auto& f : run.failures) {
    err << "failed k=" << f.k << ": " << f.reason;
    if (f.last_iterate) {
      err << " (last iterate " << report::number(f.last_iterate->real()) << ", "
          << report::number(f.last_iterate->imag()) << ")";
    }
    err << '\n';
  }
}

inline bool write_plot(const RunConfig& cfg, const Enumeration& run, std::ostream& err) {
  if (!cfg.plot_path) return true;
  std::ofstream file(*cfg.plot_path, std::ios::binary);
  if (!file) {
    err << "cannot open plot file " << *cfg.plot_path << '\n';
    return false;
  }
  const auto prob = cfg.problem();
  report::PlotOptions options;
  std::ostringstream title;
  title << to_string(cfg.kind) << " resonances, a=" << cfg.a << " b=" << cfg.b << " m=" << cfg.m;
  options.title = title.str();
  if (cfg.kind == ProblemKind::CuspCone) options.reference_im = -0.5 * prob.b() * prob.j();
  report::write_svg(file, run.resonances, options);
  return static_cast<bool>(file);
}

inline void emit_rows(std::ostream& out, const RunConfig& cfg, const std::vector<report::Row>& rows,
                      bool with_seed_distance, const nlohmann::ordered_json& summary) {
  if (cfg.format == Format::Csv) {
    report::write_csv(out, rows, with_seed_distance);
  } else {
    out << report::document(cfg.to_json(), rows, summary).dump(2) << '\n';
  }
}

// Validates and enumerates; returns nullopt (after printing) on config errors.
inline std::optional<Enumeration> run_enumeration(const RunConfig& cfg, ProblemKind expected, std::ostream& err) {
  try {
    if (cfg.kind != expected) {
      throw ConfigError(std::string("this command requires kind ") + std::string(cuspres::to_string(expected)));
    }
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return std::nullopt;
  }
  return enumerate(cfg.problem(), cfg.k_min, cfg.k_max, cfg.k_step, cfg.solver(),
                   static_cast<unsigned>(cfg.threads));
}

}  // namespace detail

/// Cusp-cone resonance table.
inline int cmd_resonances(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto run = detail::run_enumeration(cfg, ProblemKind::CuspCone, err);
  if (!run) return code(ExitCode::Config);
  std::vector<report::Row> rows;
  for (const auto& r : run->resonances) rows.push_back({r, std::nullopt});
  nlohmann::ordered_json summary;
  summary["resonances"] = run->resonances.size();
  summary["failures"] = run->failures.size();
  detail::emit_rows(out, cfg, rows, false, summary);
  detail::report_failures(err, *run);
  const bool plotted = detail::write_plot(cfg, *run, err);
  return run->complete() && plotted ? code(ExitCode::Ok) : code(ExitCode::Partial);
}

/// Funnel-cone table with the distance to the leading-order law.
inline int cmd_funnel(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto run = detail::run_enumeration(cfg, ProblemKind::FunnelCone, err);
  if (!run) return code(ExitCode::Config);
  const auto prob = cfg.problem();
  std::vector<report::Row> rows;
  double max_distance = 0.0;
  for (const auto& r : run->resonances) {
    const double distance = std::abs(r.lambda - seed_funnel(r.k, prob));
    max_distance = std::max(max_distance, distance);
    rows.push_back({r, distance});
  }
  nlohmann::ordered_json summary;
  summary["resonances"] = run->resonances.size();
  summary["failures"] = run->failures.size();
  summary["max_lambda_minus_seed_abs"] = max_distance;
  detail::emit_rows(out, cfg, rows, true, summary);
  // The CSV body stays a plain table; the footer goes to the diagnostic stream.
  err << "max lambda_minus_seed_abs: " << report::number(max_distance) << '\n';
  detail::report_failures(err, *run);
  const bool plotted = detail::write_plot(cfg, *run, err);
  return run->complete() && plotted ? code(ExitCode::Ok) : code(ExitCode::Partial);
}

struct GeodesicConfig {
  double a = -1.0;
  double b = 1.0;
  ScanGrid grid;
  int threads = 1;
};

/// Parses `<angles>x<radii>`.
inline std::pair<int, int> parse_grid(std::string_view text) {
  const std::size_t x = text.find('x');
  int angles = 0, radii = 0;
  const auto parse = [&](std::string_view piece, int& value) {
    const auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
    return !piece.empty() && ec == std::errc{} && ptr == piece.data() + piece.size() && value > 0;
  };
  if (x == std::string_view::npos || !parse(text.substr(0, x), angles) || !parse(text.substr(x + 1), radii)) {
    throw ConfigError("grid must look like <angles>x<radii>, got '" + std::string(text) + "'");
  }
  return {angles, radii};
}

/// Nontrapping scan. The verdict applies only to matched slopes a + b = 0.
inline int cmd_geodesics(const GeodesicConfig& cfg, std::ostream& out, std::ostream& err) {
  std::optional<MetricProfile> profile;
  try {
    profile.emplace(cfg.a, cfg.b);
    if (!(cfg.grid.t_max > 0.0 && cfg.grid.r_escape > 0.0)) throw ConfigError("T and R must be positive");
    if (!(cfg.grid.dt > 0.0 && cfg.grid.dt <= 1e-2)) throw ConfigError("dt must lie in (0, 1e-2]");
    if (cfg.threads < 0) throw ConfigError("threads must be non-negative");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return code(ExitCode::Config);
  }
  const auto report = nontrap_scan(*profile, cfg.grid, static_cast<unsigned>(cfg.threads));
  out << "grid: " << cfg.grid.n_angles << 'x' << cfg.grid.n_radii << '\n';
  out << "escaped: " << report.escaped << '/' << report.total << '\n';
  out << "failed: " << report.failed << '\n';
  out << "fraction_escaped: " << report::number(report.fraction_escaped) << '\n';
  out << "worst_escape_time: " << report::number(report.worst_escape_time) << '\n';
  out << "max_speed_drift_rate: " << report::number(report.max_speed_drift_rate) << '\n';
  out << "max_clairaut_drift_rate: " << report::number(report.max_clairaut_drift_rate) << '\n';
  out << "max_r_ddot: " << report::number(report.max_r_ddot) << '\n';
  for (const auto& e : report.errors) err << "integration failure: " << e << '\n';

  if (!profile->matched()) {
    out << "verdict: n/a (a+b≠0)\n";
    return report.failed > 0 ? code(ExitCode::Partial) : code(ExitCode::Ok);
  }
  const bool nontrapping = report.escaped == report.total;
  out << "verdict: " << (nontrapping ? "nontrapping" : "not all trajectories escaped") << '\n';
  return nontrapping && report.failed == 0 ? code(ExitCode::Ok) : code(ExitCode::Partial);
}

struct WeylRow {
  double lambda;
  double count;  // weyl_count * k_step
  double model;
  double ratio;
};

struct WeylSummary {
  std::vector<WeylRow> rows;  // at deciles of the run
  double lambda_max = 0.0;
  double phase_volume = 0.0;
  double model_at_max = 0.0;
};

inline WeylSummary weyl_summary(std::span<const Resonance> roots, const ModeProblem& prob, int k_step) {
  WeylSummary s;
  const std::size_t n = roots.size();
  for (int decile = 1; decile <= 10; ++decile) {
    const std::size_t idx = (static_cast<std::size_t>(decile) * n + 9) / 10 - 1;
    if (!s.rows.empty() && s.rows.back().lambda == roots[idx].lambda.real()) continue;
    const double lambda = roots[idx].lambda.real();
    const double count = static_cast<double>(weyl_count(roots, lambda)) * k_step;
    const double model = weyl_model(lambda, prob.b());
    s.rows.push_back({lambda, count, model, count / model});
  }
  s.lambda_max = roots.back().lambda.real();
  s.phase_volume = phase_volume(s.lambda_max, prob.m(), prob.b());
  s.model_at_max = weyl_model(s.lambda_max, prob.b());
  return s;
}

/// Counting function of the enumerated run against lambda log lambda/(pi b).
inline int cmd_weyl(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto run = detail::run_enumeration(cfg, ProblemKind::CuspCone, err);
  if (!run) return code(ExitCode::Config);
  detail::report_failures(err, *run);
  if (run->resonances.empty()) {
    err << "error: no resonances to count\n";
    return code(ExitCode::Config);
  }
  const auto s = weyl_summary(run->resonances, cfg.problem(), cfg.k_step);
  const double gap = std::abs(s.phase_volume - s.model_at_max);
  if (cfg.format == Format::Csv) {
    out << "lambda,count_scaled,weyl_model,ratio\n";
    for (const auto& r : s.rows) {
      out << report::number(r.lambda) << ',' << report::number(r.count) << ',' << report::number(r.model) << ','
          << report::number(r.ratio) << '\n';
    }
    err << "phase_volume(" << report::number(s.lambda_max) << ") = " << report::number(s.phase_volume)
        << ", weyl_model = " << report::number(s.model_at_max) << ", |difference| = " << report::number(gap)
        << (gap <= 2.0 * s.lambda_max ? " (within 2 lambda)" : " (exceeds 2 lambda)") << '\n';
  } else {
    nlohmann::ordered_json meta = cfg.to_json();
    meta["version"] = report::kVersion;
    nlohmann::ordered_json doc;
    doc["meta"] = meta;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : s.rows) {
      doc["rows"].push_back({{"lambda", r.lambda}, {"count_scaled", r.count}, {"weyl_model", r.model},
                             {"ratio", r.ratio}});
    }
    doc["summary"] = {{"lambda_max", s.lambda_max},
                      {"phase_volume", s.phase_volume},
                      {"weyl_model", s.model_at_max},
                      {"abs_difference", gap}};
    out << doc.dump(2) << '\n';
  }
  return run->complete() ? code(ExitCode::Ok) : code(ExitCode::Partial);
}

/// The four parameter sets of the figure: one CSV each in `out_dir` plus a
/// summary of the imaginary parts at the end of each run on `out`.
inline int cmd_figure2(const std::filesystem::path& out_dir, int threads, std::ostream& out, std::ostream& err) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    err << "error: cannot create " << out_dir.string() << ": " << ec.message() << '\n';
    return code(ExitCode::Config);
  }
  bool complete = true;
  out << "a,b,resonances,im_lambda_last,limit\n";
  for (auto [a, b] : {std::pair{-1.0, 1.0}, {-2.0, 1.0}, {-1.0, 2.0}, {-2.0, 2.0}}) {
    RunConfig cfg;
    cfg.a = a;
    cfg.b = b;
    cfg.threads = threads;
    std::ostringstream stem;
    stem << "figure2_a" << a << "_b" << b;
    cfg.plot_path = (out_dir / (stem.str() + ".svg")).string();
    std::ofstream csv(out_dir / (stem.str() + ".csv"), std::ios::binary);
    if (!csv) {
      err << "error: cannot write into " << out_dir.string() << '\n';
      return code(ExitCode::Config);
    }
    std::ostringstream table_stream;
    const int rc = cmd_resonances(cfg, table_stream, err);
    const std::string table = table_stream.str();
    csv << table;
    if (rc == code(ExitCode::Config)) return rc;
    complete = complete && rc == code(ExitCode::Ok);
    const auto run_rows = std::count(table.begin(), table.end(), '\n') - 1;
    const auto prob = cfg.problem();
    // Last data row's im_lambda is the third field.
    std::istringstream lines(table);
    std::string line, last;
    while (std::getline(lines, line)) last = line;
    std::string im = "nan";
    if (run_rows > 0) {
      const auto c1 = last.find(',');
      const auto c2 = last.find(',', c1 + 1);
      const auto c3 = last.find(',', c2 + 1);
      im = last.substr(c2 + 1, c3 - c2 - 1);
    }
    out << a << ',' << b << ',' << run_rows << ',' << im << ',' << report::number(-0.5 * b * prob.j()) << '\n';
  }
  return complete ? code(ExitCode::Ok) : code(ExitCode::Partial);
}

inline int cmd_selfcheck(bool list_only, bool inject_hankel_fault, std::ostream& out) {
  const auto suite = selfcheck::invariants();
  if (list_only) {
    for (const auto& inv : suite) out << inv.name << '\n';
    return code(ExitCode::Ok);
  }
  struct FaultGuard {
    explicit FaultGuard(bool on) {
      if (on) cuspres::detail::hankel_fault().store(1.0);
    }
    ~FaultGuard() { cuspres::detail::hankel_fault().store(0.0); }
  } guard(inject_hankel_fault);
  bool all = true;
  for (const auto& inv : suite) {
    const auto outcome = inv.run();
    all = all && outcome.passed;
    out << (outcome.passed ? "PASS " : "FAIL ") << inv.name << "  " << outcome.detail << '\n';
  }
  out << (all ? "selfcheck: all invariants passed" : "selfcheck: FAILED") << '\n';
  return all ? code(ExitCode::Ok) : code(ExitCode::SelfCheck);
}

}  // namespace cuspres::cli
