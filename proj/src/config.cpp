#include "sgn/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "sgn/reference.hpp"
#include "sgn/scenarios.hpp"

namespace sgn {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value, int line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects a real number, got '" +
                          value + "'",
                      key, line);
  return v;
}

long long parse_integer(const std::string& key, const std::string& value, int line) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || *end != '\0' || errno == ERANGE)
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects an integer, got '" +
                          value + "'",
                      key, line);
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& value, int line) {
  const long long v = parse_integer(key, value, line);
  if (v < 0)
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' must be non-negative", key,
                      line);
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects true or false", key,
                    line);
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("'" + key + "' " + what, key);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;

  using Setter = std::function<void(const std::string&, const std::string&, int)>;
  const std::map<std::string, Setter> setters = {
      {"scheme",
       [&](auto& k, auto& v, int l) {
         try {
           cfg.scheme = scheme_from_string(v);
         } catch (const InvalidArgument& e) {
           throw ConfigError("line " + std::to_string(l) + ": " + e.what(), k, l);
         }
       }},
      {"grid.length", [&](auto& k, auto& v, int l) { cfg.length = parse_real(k, v, l); }},
      {"grid.n", [&](auto& k, auto& v, int l) { cfg.n = parse_count(k, v, l); }},
      {"time.dt", [&](auto& k, auto& v, int l) { cfg.dt = parse_real(k, v, l); }},
      {"time.t_end", [&](auto& k, auto& v, int l) { cfg.t_end = parse_real(k, v, l); }},
      {"physics.g", [&](auto& k, auto& v, int l) { cfg.g = parse_real(k, v, l); }},
      {"scenario.name", [&](auto&, auto& v, int) { cfg.scenario = v; }},
      {"diff_operator",
       [&](auto& k, auto& v, int l) {
         try {
           cfg.diff = diff_kind_from_string(v);
         } catch (const InvalidArgument& e) {
           throw ConfigError("line " + std::to_string(l) + ": " + e.what(), k, l);
         }
       }},
      {"newton.tol", [&](auto& k, auto& v, int l) { cfg.newton_tol = parse_real(k, v, l); }},
      {"newton.max_iter",
       [&](auto& k, auto& v, int l) {
         cfg.newton_max_iter = static_cast<int>(parse_integer(k, v, l));
       }},
      {"output.dir", [&](auto&, auto& v, int) { cfg.output_dir = v; }},
      {"output.snapshot_stride",
       [&](auto& k, auto& v, int l) { cfg.snapshot_stride = parse_count(k, v, l); }},
      {"output.diagnostics_stride",
       [&](auto& k, auto& v, int l) { cfg.diagnostics_stride = parse_count(k, v, l); }},
      {"output.z_columns", [&](auto& k, auto& v, int l) { cfg.z_columns = parse_bool(k, v, l); }},
      {"seed",
       [&](auto& k, auto& v, int l) {
         cfg.seed = static_cast<std::uint64_t>(parse_count(k, v, l));
       }},
      {"convergence.resolutions",
       [&](auto& k, auto& v, int l) {
         cfg.resolutions.clear();
         std::istringstream list(v);
         std::string item;
         while (std::getline(list, item, ','))
           cfg.resolutions.push_back(parse_count(k, trim(item), l));
       }},
  };
  static const std::set<std::string> scenario_keys = {"scenario.h0", "scenario.a",
                                                      "scenario.width", "scenario.U",
                                                      "scenario.x0"};

  while (std::getline(in, raw)) {
    ++line;
    const std::string body = trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'", "", line);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty())
      throw ConfigError(source + ":" + std::to_string(line) + ": empty key", "", line);
    if (!seen.insert(key).second)
      throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "'", key,
                        line);
    if (const auto it = setters.find(key); it != setters.end()) {
      it->second(key, value, line);
    } else if (scenario_keys.count(key)) {
      cfg.scenario_params[key.substr(9)] = parse_real(key, value, line);
    } else {
      throw ConfigError(source + ":" + std::to_string(line) + ": unknown key '" + key + "'", key,
                        line);
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

void RunConfig::validate() const {
  require(length >= 0.0, "grid.length", "must be non-negative (0 selects the scenario default)");
  require(n >= 8, "grid.n", "must be at least 8");
  if (dt) require(*dt > 0.0, "time.dt", "must be positive");
  require(dt.has_value() || scheme == Scheme::reference_rk4, "time.dt",
          "is required for the box and spectral-midpoint schemes");
  require(t_end > 0.0, "time.t_end", "must be positive");
  require(g > 0.0, "physics.g", "must be positive");
  require(newton_tol > 0.0, "newton.tol", "must be positive");
  require(newton_max_iter >= 1, "newton.max_iter", "must be at least 1");
  require(!output_dir.empty(), "output.dir", "must not be empty");
  require(snapshot_stride >= 1, "output.snapshot_stride", "must be at least 1");
  require(diagnostics_stride >= 1, "output.diagnostics_stride", "must be at least 1");
  for (std::size_t r : resolutions) require(r >= 8, "convergence.resolutions", "entries must be >= 8");
  try {
    (void)make_scenario(scenario, scenario_params, Params{g});
  } catch (const Error& e) {
    throw ConfigError(std::string("scenario: ") + e.what(), "scenario.name");
  }
}

double RunConfig::resolved_length() const {
  if (length > 0.0) return length;
  return make_scenario(scenario, scenario_params, Params{g}).default_length;
}

double RunConfig::resolved_dt() const {
  if (dt) return *dt;
  const Grid1D grid(resolved_length(), n);
  const Scenario s = make_scenario(scenario, scenario_params, Params{g});
  return default_reference_dt(s.initial_state(grid).h, Params{g});
}

std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out = {
      {"scheme", std::string(to_string(cfg.scheme))},
      {"grid.length", format_double(cfg.resolved_length())},
      {"grid.n", std::to_string(cfg.n)},
      {"time.dt", format_double(cfg.resolved_dt())},
      {"time.t_end", format_double(cfg.t_end)},
      {"physics.g", format_double(cfg.g)},
      {"scenario.name", cfg.scenario},
      {"diff_operator", std::string(to_string(cfg.diff))},
      {"newton.tol", format_double(cfg.newton_tol)},
      {"newton.max_iter", std::to_string(cfg.newton_max_iter)},
      {"output.dir", cfg.output_dir},
      {"output.snapshot_stride", std::to_string(cfg.snapshot_stride)},
      {"output.diagnostics_stride", std::to_string(cfg.diagnostics_stride)},
      {"output.z_columns", cfg.z_columns ? "true" : "false"},
      {"seed", std::to_string(cfg.seed)},
  };
  for (const auto& [k, v] : cfg.scenario_params) out.emplace_back("scenario." + k, format_double(v));
  if (!cfg.resolutions.empty()) {
    std::string list;
    for (std::size_t i = 0; i < cfg.resolutions.size(); ++i)
      list += (i ? "," : "") + std::to_string(cfg.resolutions[i]);
    out.emplace_back("convergence.resolutions", list);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sgn
