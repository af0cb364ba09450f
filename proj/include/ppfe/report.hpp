#pragma once

#include "ppfe/analysis.hpp"
#include "ppfe/harness.hpp"

#include <ostream>
#include <string>

namespace ppfe {

/// Capacity, Mahler measure and unit-circle PBH verdicts for one scenario.
struct ConditionsReport {
  std::string scenario;
  std::vector<double> gamma;
  CapacityReport capacity;
  PbhReport pbh;
};

ConditionsReport evaluate_conditions(const Scenario& scenario);

void write_conditions_text(std::ostream& os, const ConditionsReport& report);
/// Machine-readable form; capacities that are infinite are written as the string "inf".
std::string conditions_json(const ConditionsReport& report);

/// Convergence or divergence verdict of a bound sequence in one line.
std::string bound_verdict(const BoundSequence& seq);

}  // namespace ppfe
