// mrelax command line front end: batch experiment runner for the planar
// compressible magnetic-relaxation system.
//
// subcommands:
//   run       integrate a scenario, emit time-series CSV + summary JSON
//   levels    sample the W and Z level-curve tables to CSV
//   audit     derivative/identity/quadrature audit, JSON report
//   converge  resolution, epsilon and time-step convergence sweep
//
// exit codes: 0 ok, 1 check failure, 2 config error, 3 vacuum breach,
//             4 stiffness collapse, 5 evaluation error.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mrelax/audit.hpp"
#include "mrelax/converge.hpp"
#include "mrelax/errors.hpp"
#include "mrelax/runner.hpp"

namespace {

mrelax::RunConfig load_run_config(const std::string& config_path, const std::string& scenario) {
  if (!config_path.empty()) return mrelax::parse_config_file(config_path);
  if (!scenario.empty()) return mrelax::builtin_scenario(scenario);
  throw mrelax::ConfigError("either --config or --scenario is required");
}

void ensure_parent_dir(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

int cmd_run(const std::string& config_path, const std::string& scenario, const std::string& out_dir) {
  mrelax::RunConfig cfg = load_run_config(config_path, scenario);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    if (cfg.output.series_path.empty()) cfg.output.series_path = out_dir + "/series.csv";
    if (cfg.output.summary_path.empty()) cfg.output.summary_path = out_dir + "/summary.json";
    if (cfg.output.snapshot_prefix.empty() && !cfg.output.snapshot_times.empty())
      cfg.output.snapshot_prefix = out_dir + "/snap";
  }
  const mrelax::RunArtifacts art = mrelax::execute_run(cfg);
  if (!cfg.output.series_path.empty()) {
    ensure_parent_dir(cfg.output.series_path);
    mrelax::write_series_csv(cfg.output.series_path, art.trajectory, cfg.s_list);
  }
  if (!cfg.output.summary_path.empty()) {
    ensure_parent_dir(cfg.output.summary_path);
    mrelax::write_summary_json(cfg.output.summary_path, cfg, art.summary);
  }
  if (!cfg.output.snapshot_prefix.empty()) {
    ensure_parent_dir(cfg.output.snapshot_prefix);
    mrelax::write_snapshots(cfg.output.snapshot_prefix, art.trajectory, cfg.params);
  }
  std::cout << mrelax::summary_to_json(cfg, art.summary);
  return mrelax::exit_code_for(art.summary.halt);
}

int cmd_levels(const mrelax::Params& params, double rho_lo, double rho_hi, int n_rho, double b_lo,
               double b_hi, int n_b, const std::string& out_prefix) {
  mrelax::validate_params(params);
  ensure_parent_dir(out_prefix);
  const auto tw = mrelax::relaxvars::level_grid(params, rho_lo, rho_hi, n_rho, b_lo, b_hi, n_b,
                                                mrelax::relaxvars::LevelWhich::W);
  const auto tz = mrelax::relaxvars::level_grid(params, rho_lo, rho_hi, n_rho, b_lo, b_hi, n_b,
                                                mrelax::relaxvars::LevelWhich::Z);
  mrelax::write_level_csv(out_prefix + "_W.csv", tw);
  mrelax::write_level_csv(out_prefix + "_Z.csv", tz);
  std::cout << "wrote " << out_prefix << "_W.csv and " << out_prefix << "_Z.csv ("
            << tw.size() << " points each)\n";
  return 0;
}

int cmd_audit(const mrelax::Params& params, const mrelax::AuditOptions& opt,
              const std::string& out_path) {
  const mrelax::AuditReport report = mrelax::run_audit(params, opt);
  const std::string json = mrelax::audit_report_json(report);
  if (!out_path.empty()) {
    ensure_parent_dir(out_path);
    std::ofstream out(out_path);
    out << json;
  }
  std::cout << json;
  return report.pass ? 0 : 1;
}

int cmd_converge(const std::string& config_path, const std::string& scenario,
                 const std::string& out_path) {
  mrelax::RunConfig cfg = load_run_config(config_path, scenario.empty() && config_path.empty()
                                                          ? "converge-base"
                                                          : scenario);
  const mrelax::ConvergeReport report = mrelax::run_converge(cfg);
  const std::string json = mrelax::converge_report_json(report);
  if (!out_path.empty()) {
    ensure_parent_dir(out_path);
    std::ofstream out(out_path);
    out << json;
  }
  std::cout << json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solver and verification harness for 1D compressible magnetic relaxation"};
  app.require_subcommand(1);

  std::string config_path, scenario, out_dir, out_path, out_prefix = "levels";
  mrelax::Params params;
  mrelax::AuditOptions audit_opt;
  double rho_lo = 0.25, rho_hi = 3.25, b_lo = -2.0, b_hi = 2.0;
  int n_rho = 49, n_b = 65;
  double tol = std::numeric_limits<double>::quiet_NaN();

  auto* run = app.add_subcommand("run", "integrate a configured scenario");
  run->add_option("--config", config_path, "run configuration file");
  run->add_option("--scenario", scenario, "built-in scenario tag");
  run->add_option("--out", out_dir, "output directory for series/summary/snapshots");

  auto* levels = app.add_subcommand("levels", "sample W and Z level tables");
  levels->add_option("--gamma", params.gamma, "adiabatic exponent")->capture_default_str();
  levels->add_option("--b0", params.b0, "background magnetic constant")->capture_default_str();
  levels->add_option("--rho-lo", rho_lo)->capture_default_str();
  levels->add_option("--rho-hi", rho_hi)->capture_default_str();
  levels->add_option("--n-rho", n_rho)->capture_default_str();
  levels->add_option("--b-lo", b_lo)->capture_default_str();
  levels->add_option("--b-hi", b_hi)->capture_default_str();
  levels->add_option("--n-b", n_b)->capture_default_str();
  levels->add_option("--out", out_prefix, "output file prefix")->capture_default_str();

  auto* audit = app.add_subcommand("audit", "derivative and identity audit");
  audit->add_option("--gamma", params.gamma)->capture_default_str();
  audit->add_option("--b0", params.b0)->capture_default_str();
  audit->add_option("--points", audit_opt.n_points)->capture_default_str();
  audit->add_option("--seed", audit_opt.seed)->capture_default_str();
  audit->add_option("--tol", tol, "override every check tolerance");
  audit->add_option("--out", out_path, "also write the JSON report here");

  auto* converge = app.add_subcommand("converge", "resolution/epsilon/time-step sweep");
  converge->add_option("--config", config_path, "base configuration file");
  converge->add_option("--scenario", scenario, "built-in scenario tag (default converge-base)");
  converge->add_option("--out", out_path, "also write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, scenario, out_dir);
    if (levels->parsed()) return cmd_levels(params, rho_lo, rho_hi, n_rho, b_lo, b_hi, n_b, out_prefix);
    if (audit->parsed()) {
      audit_opt.tol_override = tol;
      return cmd_audit(params, audit_opt, out_path);
    }
    if (converge->parsed()) return cmd_converge(config_path, scenario, out_path);
  } catch (const mrelax::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mrelax::VacuumError& e) {
    std::cerr << "vacuum breach: " << e.what() << "\n";
    return 3;
  } catch (const mrelax::StiffnessError& e) {
    std::cerr << "stiffness collapse: " << e.what() << "\n";
    return 4;
  } catch (const mrelax::QuadratureError& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
