#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace optcbf::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  // seconds; exceeding it fails the criterion
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240601;
};

// Each criterion is self-contained, so callers may run a subset.
CriterionResult check_class_k(const AcceptanceOptions& opts);
CriterionResult check_closed_form_alpha(const AcceptanceOptions& opts);
CriterionResult check_safe_set_grid(const AcceptanceOptions& opts);
CriterionResult check_braking_minimality(const AcceptanceOptions& opts);
CriterionResult check_closing_scenario(const AcceptanceOptions& opts);
CriterionResult check_table1_as_printed(const AcceptanceOptions& opts);
CriterionResult check_qp_oracle(const AcceptanceOptions& opts);
CriterionResult check_epsilon_closeness(const AcceptanceOptions& opts);
CriterionResult check_switching(const AcceptanceOptions& opts);

using CriterionFn = std::function<CriterionResult(const AcceptanceOptions&)>;
const std::vector<CriterionFn>& acceptance_criteria();

// Runs every criterion, writes one line per result to `os` as it finishes,
// and returns the results in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            std::ostream& os);

std::string format_result(const CriterionResult& r);

}  // namespace optcbf::cli
