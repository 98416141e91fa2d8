#pragma once

#include "erslp/benchmarks/estimators.hpp"
#include "erslp/data/synthetic.hpp"
#include "erslp/eval/rolling.hpp"
#include "erslp/inference/bootstrap.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace erslp {

struct MonteCarloConfig {
    std::vector<SyntheticSpec> dgps{SyntheticSpec{}};
    std::vector<EstimatorSpec> estimators;
    std::vector<std::size_t> horizons{1, 3, 6};
    std::size_t n_reps = 20;
    bool with_bootstrap = false;
    BootstrapConfig bootstrap;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One (dgp, repetition, estimator, horizon) outcome.
struct MonteCarloDraw {
    std::size_t dgp = 0;
    std::size_t rep = 0;
    std::string estimator;
    std::size_t horizon = 0;
    double true_beta = 0.0;
    double beta = 0.0;
    double subspace_std = 0.0;
    std::size_t selected_k = 0;
    std::optional<double> lower;
    std::optional<double> upper;
};

struct MeanSe {
    double mean = 0.0;
    /// Sample sd over repetitions divided by sqrt(n); 0 for one repetition.
    double se = 0.0;
};

struct MonteCarloCell {
    std::size_t dgp = 0;
    std::string estimator;
    std::size_t horizon = 0;
    std::size_t n_reps = 0;
    double true_beta = 0.0;
    MeanSe beta;
    MeanSe squared_error;
    MeanSe subspace_std;
    MeanSe selected_k;
    std::optional<MeanSe> width;
    std::optional<MeanSe> coverage;
};

struct MonteCarloSummary {
    std::size_t dgp = 0;
    std::string estimator;
    /// Per-repetition irf_error over the configured horizons.
    MeanSe irf_error;
};

struct MonteCarloResult {
    std::vector<MonteCarloCell> cells;
    std::vector<MonteCarloSummary> summaries;
    std::vector<MonteCarloDraw> draws;

    [[nodiscard]] const MonteCarloCell& cell(std::size_t dgp, const std::string& estimator, std::size_t horizon) const;
    [[nodiscard]] const MonteCarloSummary& summary(std::size_t dgp, const std::string& estimator) const;
};

[[nodiscard]] MeanSe mean_se(const std::vector<double>& values);

/// Repetitions share one simulated panel and one estimator seed across all estimators.
[[nodiscard]] MonteCarloResult run_monte_carlo(const MonteCarloConfig& config);

enum class AblationToggle { weighted, category_aware, adaptive_k, bootstrap };

[[nodiscard]] std::string to_string(AblationToggle t);
[[nodiscard]] AblationToggle ablation_toggle_from_string(const std::string& name);

/// The configuration with one component switched off: equal weights, uniform sampling,
/// fixed k, or no intervals.
[[nodiscard]] EstimatorSpec ablate(const EstimatorSpec& spec, AblationToggle toggle);

struct AblationRow {
    /// "full" or "no_<toggle>".
    std::string config;
    std::optional<AblationToggle> toggle;
    EvalReport report;
    /// Row minus full, per horizon; width deltas only when both rows carry intervals.
    std::map<std::size_t, double> delta_mspe;
    std::map<std::size_t, double> delta_stability;
    std::map<std::size_t, double> delta_width;
};

/// Full configuration first, then one row per toggle in the given order; all rows use
/// the same panel, windows and seed. Intervals are computed whenever options request
/// them or the bootstrap toggle is listed.
[[nodiscard]] std::vector<AblationRow> run_ablation(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                    const EstimatorSpec& full, const std::vector<AblationToggle>& toggles,
                                                    const RollingWindowSpec& windows,
                                                    std::span<const std::size_t> horizons, const EvalOptions& options,
                                                    std::uint64_t seed);

}  // namespace erslp
