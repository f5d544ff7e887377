#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mrelax/config.hpp"
#include "mrelax/errors.hpp"
#include "mrelax/converge.hpp"
#include "mrelax/runner.hpp"

using namespace mrelax;

TEST_CASE("config parsing") {
  const std::string text = R"(
# comment
[grid]
n = 64
length = 6.283185307179586

[params]
gamma = 1.6
b0 = 0.8
epsilon = 1e-4

[initial]
rho_mean = 1.2
b_mean = 0.1
rho_pert = 1 0.05 0
rho_pert = 3 0.01 1.0
b_pert = 2 0.02 -1.5707963267948966

[step]
cfl = 0.4
t_end = 2.5

[diagnostics]
cadence = 0.01
s_list = 1, 2

[output]
series = out/x.csv

[scenario]
tag = custom
)";
  const RunConfig cfg = parse_config_text(text);
  CHECK(cfg.n == 64);
  CHECK(cfg.params.gamma == 1.6);
  CHECK(cfg.params.epsilon == 1e-4);
  CHECK(cfg.initial.rho_pert.size() == 2);  // duplicate keys accumulate
  CHECK(cfg.initial.rho_pert[1].mode == 3);
  CHECK(cfg.step.cfl == 0.4);
  CHECK(cfg.step.t_end == 2.5);
  CHECK(cfg.s_list == std::vector<int>{1, 2});
  CHECK(cfg.output.series_path == "out/x.csv");
  CHECK(cfg.tag == "custom");
  CHECK_NOTHROW(validate_config(cfg));

  CHECK_THROWS_AS(parse_config_text("[grid\nn = 4"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[grid]\nnonsense"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[grid]\nn = twelve"), ConfigError);
}

TEST_CASE("config validation failures") {
  RunConfig cfg = builtin_scenario("relax-b0");
  cfg.params.gamma = 2.3;
  CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("(1, 2)"), ConfigError);

  cfg = builtin_scenario("relax-b0");
  cfg.n = 17;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  cfg = builtin_scenario("relax-b0");
  cfg.initial.rho_pert = {{0, 0.1, 0.0}};  // mode 0 would shift the declared mean
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  cfg = builtin_scenario("relax-b0");
  cfg.initial.rho_pert = {{1, 1.5, 0.0}};  // nonpositive initial density
  CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("nonpositive"), ConfigError);

  cfg = builtin_scenario("relax-b0");
  cfg.step.cfl = 1.5;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("built-in scenarios") {
  for (const std::string& tag : builtin_scenario_names()) {
    const RunConfig cfg = builtin_scenario(tag);
    CHECK(cfg.tag == tag);
    CHECK_NOTHROW(validate_config(cfg));
  }
  CHECK_THROWS_AS(builtin_scenario("no-such-thing"), ConfigError);

  // relax-b0 initial data: rho = 1 + 0.01 cos x, B = 0.01 sin x
  const RunConfig cfg = builtin_scenario("relax-b0");
  const State s = build_initial_state(cfg);
  const Grid& g = s.rho.grid();
  for (std::size_t i = 0; i < g.n; i += 13) {
    const double x = g.points[i];
    CHECK(s.rho[i] == doctest::Approx(1.0 + 0.01 * std::cos(x)).epsilon(1e-14));
    CHECK(s.b[i] == doctest::Approx(0.01 * std::sin(x)).epsilon(1e-14));
  }
  CHECK(std::abs(mean(s.rho) - 1.0) < 1e-14);
  CHECK(std::abs(mean(s.b)) < 1e-14);
}

TEST_CASE("scenario tag in a config file seeds the defaults") {
  const std::string text = "[scenario]\ntag = relax-bbar\n[grid]\nn = 64\n";
  const RunConfig cfg = parse_config_text(text);
  CHECK(cfg.n == 64);                      // overridden
  CHECK(cfg.initial.b_mean == 0.5);        // inherited from relax-bbar
  CHECK(cfg.step.t_end == 20.0);
}

TEST_CASE("series CSV round-trips bit-exactly at 17 significant digits") {
  RunConfig cfg = builtin_scenario("relax-b0");
  cfg.n = 64;
  cfg.step.t_end = 0.05;
  cfg.cadence = 0.01;
  const RunArtifacts art = execute_run(cfg);
  REQUIRE(art.trajectory.halt == HaltCause::completed);

  const std::string path = "roundtrip_test_series.csv";
  write_series_csv(path, art.trajectory, cfg.s_list);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "t,mass,flux_mean,energy,dissipation,min_rho,max_rho,max_abs_b,min_w,min_z,"
        "l2_rho_dev,l2_b_dev,hs1_rho,hs1_b,coupled1,coupled2,dt");

  std::size_t row = 0;
  std::string line;
  while (std::getline(in, line)) {
    REQUIRE(row < art.trajectory.records.size());
    const auto& r = art.trajectory.records[row].rec;
    std::vector<double> want{r.time,    r.mass,       r.flux_mean, r.energy,
                             r.dissipation, r.min_rho, r.max_rho,   r.max_abs_b,
                             r.min_w,   r.min_z,      r.l2_rho_dev, r.l2_b_dev,
                             r.hs_rho[0], r.hs_b[0],  r.coupled1,  r.coupled2,
                             r.dt_used};
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      REQUIRE(col < want.size());
      const double parsed = std::strtod(cell.c_str(), nullptr);
      if (std::isnan(want[col])) {
        CHECK(std::isnan(parsed));
      } else {
        CHECK(parsed == want[col]);  // bit-exact after the 17-digit round trip
      }
      ++col;
    }
    CHECK(col == want.size());
    ++row;
  }
  CHECK(row == art.trajectory.records.size());
  std::remove(path.c_str());
}

TEST_CASE("degenerate single-cell converge sweep returns a one-entry report") {
  RunConfig cfg = builtin_scenario("converge-base");
  cfg.step.t_end = 0.02;
  cfg.converge.n_sweep = {64};
  cfg.converge.reference_n = 128;
  cfg.converge.eps_sweep = {0.0};
  cfg.converge.eps_study_n = 64;
  cfg.converge.richardson_n = 32;
  cfg.converge.richardson_levels = 1;
  cfg.converge.richardson_t = 0.01;
  const ConvergeReport rep = run_converge(cfg);
  CHECK(rep.spatial.size() == 1);
  CHECK(rep.spatial.front().status == "ok");
  CHECK(rep.spatial_orders.empty());
  CHECK(rep.epsilon.size() == 1);
  const std::string json = converge_report_json(rep);
  CHECK(json.find("\"spatial\"") != std::string::npos);
}

TEST_CASE("run summary carries conservation and fit verdicts") {
  RunConfig cfg = builtin_scenario("relax-b0");
  cfg.n = 64;
  cfg.step.t_end = 0.2;
  cfg.cadence = 0.02;
  const RunArtifacts art = execute_run(cfg);
  CHECK(art.summary.halt == HaltCause::completed);
  CHECK(art.summary.mass_drift_rel < 1e-12);
  CHECK(art.summary.flux_drift_rel < 1e-12);
  CHECK(art.summary.energy_increase_rel < 1e-9);
  CHECK(art.summary.fits.size() == 2);  // l2 deviations for the b_bar = 0 scenario
  const std::string json = summary_to_json(cfg, art.summary);
  CHECK(json.find("\"halting_cause\": \"completed\"") != std::string::npos);
  CHECK(json.find("mass_drift_rel") != std::string::npos);
}
