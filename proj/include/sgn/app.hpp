#pragma once

// Command implementations behind the sgn executable. Each returns the process
// exit code: 0 success, 1 run failure, 2 configuration failure. Errors are
// written to `err` as one JSON object.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sgn/errors.hpp"

namespace sgn {

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool lower_bound = false;  // pass when value >= threshold instead of <=
  bool pass = false;
};

/// Structure, lift, identity, certification and SIMD-equivalence checks.
std::vector<VerifyCheck> verification_battery(std::uint64_t seed);

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_verify(std::uint64_t seed, std::ostream& out, std::ostream& err);
int cmd_convergence(const std::string& config_path, const std::vector<std::size_t>& resolutions,
                    std::ostream& out, std::ostream& err);
int cmd_compare(const std::string& config_path, std::ostream& out, std::ostream& err);

/// {"error": kind, "message": ..., plus key/line or cause/step/time when known}
std::string error_json(const std::exception& e);

}  // namespace sgn
