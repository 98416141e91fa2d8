#pragma once

#include "erslp/eval/experiments.hpp"
#include "erslp/eval/rolling.hpp"
#include "erslp/inference/bootstrap.hpp"
#include "erslp/lp/fit.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace erslp {

inline constexpr int kSchemaVersion = 1;

/// Round-trip formatting (%.17g); empty for absent or non-finite values.
[[nodiscard]] std::string format_number(double v);
[[nodiscard]] std::string format_number(const std::optional<double>& v);

/// One IRF row per horizon; intervals are optional.
struct IrfRow {
    std::string estimator;
    IrfEstimate estimate;
    std::optional<ConfidenceInterval> interval;
};

// Column orders are fixed; see the README for the schema.
void write_irf_csv(std::ostream& os, const std::vector<IrfRow>& rows);
void write_k_curve_csv(std::ostream& os, const std::vector<std::pair<std::size_t, SelectKResult>>& curves);
void write_eval_summary_csv(std::ostream& os, const std::vector<EvalReport>& reports);
void write_eval_windows_csv(std::ostream& os, const std::vector<EvalReport>& reports);
void write_monte_carlo_csv(std::ostream& os, const MonteCarloResult& result);
void write_monte_carlo_summary_csv(std::ostream& os, const MonteCarloResult& result);
void write_ablation_csv(std::ostream& os, const std::vector<AblationRow>& rows);

[[nodiscard]] nlohmann::ordered_json to_json(const IrfRow& row);
[[nodiscard]] nlohmann::ordered_json to_json(const EvalReport& report);
[[nodiscard]] nlohmann::ordered_json to_json(const MonteCarloResult& result);
[[nodiscard]] nlohmann::ordered_json to_json(const std::vector<AblationRow>& rows);

}  // namespace erslp
