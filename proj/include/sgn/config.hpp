#pragma once

// Run configuration: flat "key = value" text with dotted sections, '#' comments.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgn/core.hpp"
#include "sgn/errors.hpp"
#include "sgn/integrators.hpp"

namespace sgn {

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key_name = {}, int line_no = 0)
      : Error(what), key(std::move(key_name)), line(line_no) {}
  const char* kind() const noexcept override { return "ConfigError"; }
  std::string key;
  int line;  // 0 when not tied to a line
};

struct RunConfig {
  Scheme scheme = Scheme::box;
  double length = 0.0;  // 0 selects the scenario default
  std::size_t n = 257;
  std::optional<double> dt;  // required except for reference-rk4
  double t_end = 1.0;
  double g = 9.81;
  std::string scenario = "solitary";
  std::map<std::string, double> scenario_params;
  DiffKind diff = DiffKind::fourier;
  double newton_tol = 1e-11;
  int newton_max_iter = 25;
  std::string output_dir = "output";
  std::size_t snapshot_stride = 10;
  std::size_t diagnostics_stride = 1;
  bool z_columns = false;
  std::uint64_t seed = 0;
  std::vector<std::size_t> resolutions;  // convergence studies only

  /// Every field is checked here, before anything runs or touches the disk.
  /// Scenario parameters are checked by constructing the scenario.
  void validate() const;

  /// Length of the run domain after defaults are applied.
  double resolved_length() const;
  /// dt after defaults are applied.
  double resolved_dt() const;
};

/// Parses configuration text; `source` names the input in diagnostics.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Canonical "key = value" lines of the resolved configuration, sorted by key.
std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& cfg);

/// %.17g
std::string format_double(double v);

}  // namespace sgn
