#pragma once

#include "ppfe/harness.hpp"

#include <stdexcept>
#include <string>

namespace ppfe {

/// Malformed or inconsistent scenario description.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses a JSON scenario. Keys (all optional except where a preset does not supply them):
///   "preset":   name of a preset used as the base,
///   "model":    "three-tank" or {"A", "B", "D", "Q", "x0", "P0", "u"},
///   "sensors":  [{"C", "E", "R"}, ...],
///   "channel":  {"gamma": [...], "gamma_e": [...]},
///   "codec":    {"a": [...], "delta": [...], "s": 1, "transparent": false},
///   "horizon", "trials", "seed",
///   "eavesdropper_policy": "own-history" | "overhear-ack",
///   "legit_decode_noise":  "bound" | "realized",
///   "outcome_override": {"gamma": [[...]], "gamma_e": [[...]]}
///                     | {"worst_case": {"channel": i (1-based), "k_bar": k}}.
/// Matrices are nested arrays (row-major) or a bare number for 1x1.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

}  // namespace ppfe
