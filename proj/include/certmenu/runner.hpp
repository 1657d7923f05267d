#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "certmenu/model.hpp"
#include "certmenu/solver.hpp"

namespace certmenu {

struct OutputSpec {
  std::string dir = ".";
  int precision = 12;  // fixed decimal digits in CSV output
};

struct RunConfig {
  ModelConfig model;
  OutputSpec output;
  std::uint64_t seed = 12345;
};

// Flat dotted-key config text ("model.gamma = 0.25", '#' comments).  The key
// set is closed: unknown or duplicate keys, missing required keys, malformed
// numbers, and out-of-range values all raise std::invalid_argument with a
// message naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Locale-independent fixed-precision formatting used for all CSV output.
std::string format_fixed(double x, int precision);

void write_mechanism_csv(const std::string& path, const ModelConfig& cfg,
                         const MechanismSolution& sol, int precision);

// Full CLI dispatch (args exclude argv[0]).  Exit codes: 0 success,
// 1 property/verification failure, 2 usage or config error.
int run_command(const std::vector<std::string>& args);

}  // namespace certmenu
