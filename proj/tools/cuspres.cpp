// cuspres: resonance tables, funnel runs, geodesic scans, Weyl diagnostics
// and the self-check suite.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cuspres/commands.hpp"

namespace {

using cuspres::cli::ExitCode;

int threads_default() {
  if (const char* env = std::getenv("CUSPRES_THREADS")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      return -1;  // rejected by validation
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering resonances of cone-cusp and cone-funnel surfaces of revolution", "cuspres"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cuspres::report::kVersion));
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.get_config_formatter_base()->arrayDelimiter(',');

  cuspres::cli::RunConfig run;
  run.threads = threads_default();
  std::string range = "10:1000:10";
  std::string format = "csv";
  std::string plot;

  app.add_option("--a", run.a, "cone slope parameter a");
  app.add_option("--b", run.b, "end parameter b");
  app.add_option("--m", run.m, "Fourier mode m > 0");
  app.add_option("--k", range, "index range k_min:k_max:step");
  app.add_option("--rel-tol", run.rel_tol, "relative residual tolerance of the polish");
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--plot", plot, "write an SVG scatter plot to this path");
  app.add_option("--threads", run.threads, "worker threads, 0 = all cores (default: $CUSPRES_THREADS or 1)");

  app.add_subcommand("resonances", "cusp-cone resonance table")->fallthrough();
  auto* funnel = app.add_subcommand("funnel", "funnel-cone resonance table")->fallthrough();
  auto* weyl = app.add_subcommand("weyl", "counting function against the Weyl model")->fallthrough();

  auto* figure2 = app.add_subcommand("figure2", "the four cusp-cone runs k = 10..1000 step 10")->fallthrough();
  std::string out_dir = "figure2";
  figure2->add_option("--out-dir", out_dir, "directory for the CSV and SVG files");

  auto* geodesics = app.add_subcommand("geodesics", "nontrapping scan of the geodesic flow")->fallthrough();
  cuspres::cli::GeodesicConfig geo;
  std::string grid = "36x17";
  geodesics->add_option("--grid", grid, "<angles>x<radii>");
  geodesics->add_option("--T", geo.grid.t_max, "time limit per trajectory");
  geodesics->add_option("--R", geo.grid.r_escape, "escape radius |r| > R");
  geodesics->add_option("--dt", geo.grid.dt, "integrator step");
  geodesics->add_option("--r-min", geo.grid.r_min, "smallest launch radius");
  geodesics->add_option("--r-max", geo.grid.r_max, "largest launch radius");

  auto* selfcheck = app.add_subcommand("selfcheck", "run every module invariant on reduced grids");
  bool list_only = false;
  bool inject_fault = false;
  selfcheck->add_flag("--list", list_only, "print invariant names without running them");
  selfcheck->add_flag("--inject-hankel-fault", inject_fault, "perturb a Hankel coefficient (test hook)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cuspres::cli::code(ExitCode::Config);
  }

  try {
    if (*selfcheck) return cuspres::cli::cmd_selfcheck(list_only, inject_fault, std::cout);

    if (*geodesics) {
      geo.a = run.a;
      geo.b = run.b;
      geo.threads = run.threads;
      const auto [angles, radii] = cuspres::cli::parse_grid(grid);
      geo.grid.n_angles = angles;
      geo.grid.n_radii = radii;
      return cuspres::cli::cmd_geodesics(geo, std::cout, std::cerr);
    }
    if (*figure2) return cuspres::cli::cmd_figure2(out_dir, run.threads, std::cout, std::cerr);

    const auto k = cuspres::cli::parse_range(range);
    run.k_min = k.k_min;
    run.k_max = k.k_max;
    run.k_step = k.k_step;
    run.format = format == "json" ? cuspres::cli::Format::Json : cuspres::cli::Format::Csv;
    if (!plot.empty()) run.plot_path = plot;

    if (*funnel) {
      run.kind = cuspres::ProblemKind::FunnelCone;
      return cuspres::cli::cmd_funnel(run, std::cout, std::cerr);
    }
    if (*weyl) return cuspres::cli::cmd_weyl(run, std::cout, std::cerr);
    return cuspres::cli::cmd_resonances(run, std::cout, std::cerr);
  } catch (const cuspres::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cuspres::cli::code(ExitCode::Config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cuspres::cli::code(ExitCode::Partial);
  }
}
