#include "ppfe/report.hpp"

#include "ppfe/format.hpp"

#include <json.hpp>

#include <cmath>

namespace ppfe {

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

ConditionsReport evaluate_conditions(const Scenario& sc) {
  ConditionsReport r;
  r.scenario = sc.name;
  r.gamma = sc.channel.authorized;
  r.capacity = capacity_condition(sc.model.A, sc.channel.authorized);
  r.pbh = pbh_unit_circle(sc.model.A, sc.model.effective_process_cov());
  return r;
}

void write_conditions_text(std::ostream& os, const ConditionsReport& r) {
  os << "scenario: " << r.scenario << '\n'
     << "total channel capacity: " << format_double(r.capacity.capacity) << '\n'
     << "Mahler measure M(A): " << format_double(r.capacity.measure) << '\n'
     << "topological entropy ln M(A): " << format_double(r.capacity.entropy) << '\n'
     << "capacity condition (capacity > entropy): " << (r.capacity.holds ? "true" : "false")
     << '\n'
     << "unit-circle eigenvalues: " << r.pbh.unit_circle_eigenvalues.size() << '\n';
  for (std::size_t j = 0; j < r.pbh.unit_circle_eigenvalues.size(); ++j) {
    const auto l = r.pbh.unit_circle_eigenvalues[j];
    os << "  lambda = " << format_double(l.real()) << (l.imag() < 0 ? " - " : " + ")
       << format_double(std::abs(l.imag())) << "j: " << (r.pbh.full_rank[j] ? "full rank" : "rank deficient")
       << '\n';
  }
  os << "PBH unit-circle condition: " << (r.pbh.holds ? "true" : "false") << '\n';
}

std::string conditions_json(const ConditionsReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["gamma"] = nlohmann::json::array();
  for (double g : r.gamma) j["gamma"].push_back(g);
  j["capacity"] = number(r.capacity.capacity);
  j["mahler_measure"] = number(r.capacity.measure);
  j["entropy"] = number(r.capacity.entropy);
  j["capacity_condition"] = r.capacity.holds;
  j["pbh"]["holds"] = r.pbh.holds;
  j["pbh"]["unit_circle_eigenvalues"] = nlohmann::json::array();
  for (std::size_t k = 0; k < r.pbh.unit_circle_eigenvalues.size(); ++k) {
    const auto l = r.pbh.unit_circle_eigenvalues[k];
    j["pbh"]["unit_circle_eigenvalues"].push_back(
        {{"re", l.real()}, {"im", l.imag()}, {"full_rank", bool(r.pbh.full_rank[k])}});
  }
  return j.dump(2) + "\n";
}

std::string bound_verdict(const BoundSequence& seq) {
  const double last = seq.iterates.empty() ? 0.0 : seq.iterates.back().trace();
  if (seq.diverged) {
    return "diverged after " + std::to_string(seq.iterates.size() - 1) +
           " iterations (trace " + format_double(last) + ")";
  }
  if (seq.converged) {
    return "converged after " + std::to_string(*seq.converged_at) +
           " iterations, fixed-point trace " + format_double(seq.fixed_point->trace());
  }
  return "not converged after " + std::to_string(seq.iterates.size() - 1) +
         " iterations (trace " + format_double(last) + ")";
}

}  // namespace ppfe
