#ifndef FEDQ_SCENARIO_HPP
#define FEDQ_SCENARIO_HPP

#include <cstdint>
#include <string>

#include "fedq/json_io.hpp"

namespace fedq {

// Exit codes of the batch front end: 0 success, 1 input error, 2 the run
// completed but found contract violations (non-central residuals, rejected
// memberships, failed verification panels).
struct ScenarioResult {
    json report;
    int exit_code = 0;
};

// Runs one scenario. The JSON must carry "command"; "seed" and "order" may be
// overridden (pass UINT64_MAX / -1 to keep the scenario's values).
ScenarioResult run_scenario(const json& scenario, uint64_t seed_override = UINT64_MAX,
                            int order_override = -1);

ScenarioResult run_scenario_text(const std::string& text, uint64_t seed_override = UINT64_MAX,
                                 int order_override = -1);

// Plain-text rendering of a report.
std::string report_to_text(const json& report);

}  // namespace fedq

#endif
