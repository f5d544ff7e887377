#include "mrelax/config.hpp"

#include <cmath>
#include <fstream>
#include <algorithm>
#include <map>
#include <sstream>

#include "mrelax/errors.hpp"

namespace mrelax {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct RawConfig {
  // section -> key -> all occurrences in file order
  std::map<std::string, std::map<std::string, std::vector<std::string>>> kv;

  const std::vector<std::string>* find(const std::string& sec, const std::string& key) const {
    auto s = kv.find(sec);
    if (s == kv.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  }
  std::optional<std::string> last(const std::string& sec, const std::string& key) const {
    const auto* v = find(sec, key);
    if (!v || v->empty()) return std::nullopt;
    return v->back();
  }
};

RawConfig parse_raw(const std::string& text, const std::string& origin) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    raw.kv[section][key].push_back(value);
  }
  return raw;
}

double to_double(const std::string& v, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (...) {
  }
  throw ConfigError("config: cannot parse '" + v + "' as a number for " + what);
}

long to_long(const std::string& v, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (...) {
  }
  throw ConfigError("config: cannot parse '" + v + "' as an integer for " + what);
}

bool to_bool(const std::string& v, const std::string& what) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: cannot parse '" + v + "' as a boolean for " + what);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

PerturbationMode parse_mode(const std::string& v, const std::string& what) {
  const auto parts = split_list(v);
  if (parts.size() != 3)
    throw ConfigError("config: " + what + " wants 'mode amplitude phase', got '" + v + "'");
  PerturbationMode m;
  m.mode = static_cast<int>(to_long(parts[0], what + " mode"));
  m.amplitude = to_double(parts[1], what + " amplitude");
  m.phase = to_double(parts[2], what + " phase");
  return m;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  const RawConfig raw = parse_raw(text, origin);
  RunConfig cfg;

  // a built-in scenario tag seeds the defaults; any other tag is just a label
  if (auto v = raw.last("scenario", "tag")) {
    const auto names = builtin_scenario_names();
    if (std::find(names.begin(), names.end(), *v) != names.end()) cfg = builtin_scenario(*v);
  }

  if (auto v = raw.last("grid", "n")) cfg.n = static_cast<std::size_t>(to_long(*v, "grid.n"));
  if (auto v = raw.last("grid", "length")) cfg.length = to_double(*v, "grid.length");
  if (auto v = raw.last("grid", "dealias")) cfg.step.dealias = to_bool(*v, "grid.dealias");

  if (auto v = raw.last("params", "gamma")) cfg.params.gamma = to_double(*v, "params.gamma");
  if (auto v = raw.last("params", "b0")) cfg.params.b0 = to_double(*v, "params.b0");
  if (auto v = raw.last("params", "epsilon")) cfg.params.epsilon = to_double(*v, "params.epsilon");

  if (auto v = raw.last("initial", "rho_mean")) cfg.initial.rho_mean = to_double(*v, "initial.rho_mean");
  if (auto v = raw.last("initial", "b_mean")) cfg.initial.b_mean = to_double(*v, "initial.b_mean");
  if (const auto* vs = raw.find("initial", "rho_pert")) {
    cfg.initial.rho_pert.clear();
    for (const auto& v : *vs) cfg.initial.rho_pert.push_back(parse_mode(v, "initial.rho_pert"));
  }
  if (const auto* vs = raw.find("initial", "b_pert")) {
    cfg.initial.b_pert.clear();
    for (const auto& v : *vs) cfg.initial.b_pert.push_back(parse_mode(v, "initial.b_pert"));
  }

  if (auto v = raw.last("step", "cfl")) cfg.step.cfl = to_double(*v, "step.cfl");
  if (auto v = raw.last("step", "dt_min")) cfg.step.dt_min = to_double(*v, "step.dt_min");
  if (auto v = raw.last("step", "dt_max")) cfg.step.dt_max = to_double(*v, "step.dt_max");
  if (auto v = raw.last("step", "t_end")) cfg.step.t_end = to_double(*v, "step.t_end");

  if (auto v = raw.last("diagnostics", "cadence")) cfg.cadence = to_double(*v, "diagnostics.cadence");
  if (auto v = raw.last("diagnostics", "s_list")) {
    cfg.s_list.clear();
    for (const auto& part : split_list(*v))
      cfg.s_list.push_back(static_cast<int>(to_long(part, "diagnostics.s_list")));
  }

  if (auto v = raw.last("output", "series")) cfg.output.series_path = *v;
  if (auto v = raw.last("output", "summary")) cfg.output.summary_path = *v;
  if (auto v = raw.last("output", "snapshot_prefix")) cfg.output.snapshot_prefix = *v;
  if (auto v = raw.last("output", "snapshot_times")) {
    cfg.output.snapshot_times.clear();
    for (const auto& part : split_list(*v))
      cfg.output.snapshot_times.push_back(to_double(part, "output.snapshot_times"));
  }

  if (auto v = raw.last("converge", "n_sweep")) {
    cfg.converge.n_sweep.clear();
    for (const auto& part : split_list(*v))
      cfg.converge.n_sweep.push_back(static_cast<int>(to_long(part, "converge.n_sweep")));
  }
  if (auto v = raw.last("converge", "reference_n"))
    cfg.converge.reference_n = static_cast<int>(to_long(*v, "converge.reference_n"));
  if (auto v = raw.last("converge", "eps_sweep")) {
    cfg.converge.eps_sweep.clear();
    for (const auto& part : split_list(*v))
      cfg.converge.eps_sweep.push_back(to_double(part, "converge.eps_sweep"));
  }
  if (auto v = raw.last("converge", "eps_study_n"))
    cfg.converge.eps_study_n = static_cast<int>(to_long(*v, "converge.eps_study_n"));
  if (auto v = raw.last("converge", "richardson_n"))
    cfg.converge.richardson_n = static_cast<int>(to_long(*v, "converge.richardson_n"));
  if (auto v = raw.last("converge", "richardson_cfl"))
    cfg.converge.richardson_cfl = to_double(*v, "converge.richardson_cfl");
  if (auto v = raw.last("converge", "richardson_levels"))
    cfg.converge.richardson_levels = static_cast<int>(to_long(*v, "converge.richardson_levels"));
  if (auto v = raw.last("converge", "richardson_t"))
    cfg.converge.richardson_t = to_double(*v, "converge.richardson_t");

  if (auto v = raw.last("scenario", "tag")) cfg.tag = *v;
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void validate_config(const RunConfig& cfg) {
  validate_params(cfg.params);
  if (cfg.n % 2 != 0 || cfg.n < 16 || cfg.n > (std::size_t{1} << 22))
    throw ConfigError("config: grid.n must be even, >= 16 and of sane size");
  if (!(cfg.length > 0.0)) throw ConfigError("config: grid.length must be positive");
  if (!(cfg.step.cfl > 0.0 && cfg.step.cfl <= 1.0))
    throw ConfigError("config: step.cfl must lie in (0, 1]");
  if (!(cfg.step.dt_min <= cfg.step.dt_max))
    throw ConfigError("config: step.dt_min must not exceed step.dt_max");
  if (!(cfg.step.t_end >= 0.0)) throw ConfigError("config: step.t_end must be nonnegative");
  if (!(cfg.cadence > 0.0)) throw ConfigError("config: diagnostics.cadence must be positive");
  for (const auto& m : cfg.initial.rho_pert)
    if (m.mode < 1)
      throw ConfigError("config: rho_pert modes must be >= 1 to preserve the declared mean");
  for (const auto& m : cfg.initial.b_pert)
    if (m.mode < 1)
      throw ConfigError("config: b_pert modes must be >= 1 to preserve the declared mean");
  if (!(cfg.initial.rho_mean > 0.0)) throw ConfigError("config: initial.rho_mean must be positive");
  // evaluate the initial data and insist on pointwise positivity
  const State s0 = build_initial_state(cfg);
  const std::size_t imin = argmin_rho(s0.rho);
  if (!(s0.rho[imin] > 0.0))
    throw ConfigError("config: initial density is nonpositive at grid index " +
                      std::to_string(imin));
}

State build_initial_state(const RunConfig& cfg) {
  const GridPtr g = make_grid(cfg.n, cfg.length);
  auto eval = [&](double mean_value, const std::vector<PerturbationMode>& modes, double x) {
    double v = mean_value;
    for (const auto& m : modes)
      v += m.amplitude * std::cos(m.mode * kTwoPi * x / cfg.length + m.phase);
    return v;
  };
  State s;
  s.rho = Field::sample(g, [&](double x) { return eval(cfg.initial.rho_mean, cfg.initial.rho_pert, x); });
  s.b = Field::sample(g, [&](double x) { return eval(cfg.initial.b_mean, cfg.initial.b_pert, x); });
  s.time = 0.0;
  return s;
}

RunConfig builtin_scenario(const std::string& tag) {
  const double half_pi = std::numbers::pi / 2.0;
  RunConfig cfg;
  cfg.tag = tag;
  if (tag == "relax-b0") {
    cfg.n = 128;
    cfg.params = Params{1.5, 1.0, 0.0};
    cfg.initial.rho_mean = 1.0;
    cfg.initial.b_mean = 0.0;
    // both perturbations on mode 1: quadratic mode transfer then only feeds
    // faster-decaying modes, keeping both deviation norms log-linear through
    // the whole fit window
    cfg.initial.rho_pert = {{1, 1e-2, 0.0}};
    cfg.initial.b_pert = {{1, 1e-2, -half_pi}};  // 1e-2 sin(x)
    cfg.step.cfl = 0.5;
    cfg.step.t_end = 20.0;
    cfg.cadence = 0.0025;
    cfg.s_list = {1};
  } else if (tag == "relax-bbar") {
    cfg = builtin_scenario("relax-b0");
    cfg.tag = tag;
    cfg.initial.b_mean = 0.5;
  } else if (tag == "probe-vacuum") {
    cfg.n = 128;
    cfg.params = Params{1.5, 1.0, 0.0};
    cfg.initial.rho_mean = 1.0;
    cfg.initial.b_mean = 0.0;
    cfg.initial.rho_pert = {{1, 0.9, 0.0}};       // min rho(0) = 0.1
    cfg.initial.b_pert = {{1, 1.5, -half_pi}};
    cfg.step.cfl = 0.5;
    cfg.step.t_end = 1.0;
    cfg.cadence = 0.01;
  } else if (tag == "converge-base") {
    // strong low modes drive the nonlinear cascade (spatial study); the
    // high-mode components keep stiff content alive at the short horizon so
    // the time-step ladder measures a real temporal error
    cfg.n = 128;
    cfg.params = Params{1.5, 1.0, 0.0};
    cfg.initial.rho_mean = 1.0;
    cfg.initial.b_mean = 0.25;
    cfg.initial.rho_pert = {{1, 0.55, 0.0}, {6, 0.08, 0.7}};
    cfg.initial.b_pert = {{1, 0.3, -half_pi}, {5, 0.06, 0.3}};
    cfg.step.cfl = 0.5;
    cfg.step.t_end = 0.1;
    cfg.cadence = 0.05;
  } else {
    throw ConfigError("unknown scenario tag '" + tag + "'");
  }
  return cfg;
}

std::vector<std::string> builtin_scenario_names() {
  return {"relax-b0", "relax-bbar", "probe-vacuum", "converge-base"};
}

}  // namespace mrelax
