#pragma once

#include "erslp/cli/config.hpp"
#include "erslp/util/error.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace erslp::cli {

struct LoadedData {
    TimeSeriesPanel panel;
    VariableRoles roles;
};

/// Reads or simulates the panel, applies transforms and the missing-value policy,
/// and resolves roles (config, then truth sidecar, then synthetic defaults).
[[nodiscard]] LoadedData load_data(const RunConfig& config);

void cmd_simulate(const RunConfig& config, std::ostream& log);
void cmd_estimate(const RunConfig& config, std::ostream& log);
void cmd_evaluate(const RunConfig& config, std::ostream& log);
void cmd_ablate(const RunConfig& config, std::ostream& log);
void cmd_montecarlo(const RunConfig& config, std::ostream& log);

/// 0 success, 2 configuration or usage error, 3 data or input error,
/// 4 numerical or inference error, 1 anything else.
[[nodiscard]] int exit_code(ErrorKind kind) noexcept;

/// Entry point behind the erslp executable. Failures print a JSON error report to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace erslp::cli
