#pragma once

#include "erslp/data/panel.hpp"
#include "erslp/ensemble/rslp.hpp"
#include "erslp/lp/design.hpp"
#include "erslp/lp/fit.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace erslp {

enum class IntervalMethod { percentile, bca };

/// design_rows resamples (regressors_t, y_{t+h}) pairs of the per-horizon design;
/// panel_rows resamples panel time indices and rebuilds the design on the result.
enum class ResampleUnit { design_rows, panel_rows };

struct BootstrapConfig {
    std::size_t B = 200;
    std::optional<std::size_t> block_length;
    IntervalMethod interval = IntervalMethod::percentile;
    double confidence = 0.95;
    std::uint64_t seed = 0;
    ResampleUnit unit = ResampleUnit::design_rows;

    void validate() const;
};

struct ConfidenceInterval {
    std::size_t horizon = 0;
    double lower = 0.0;
    double upper = 0.0;
    double width = 0.0;
    double point = 0.0;
    std::vector<double> replicate_betas;
    IntervalMethod method = IntervalMethod::percentile;
    std::size_t B = 0;
    std::size_t block_length = 0;
    std::size_t n_failed = 0;

    [[nodiscard]] bool covers(double value) const noexcept { return lower <= value && value <= upper; }
};

[[nodiscard]] std::string to_string(IntervalMethod m);

/// Moving-block resample of {0..T-1}: ceil(T/l) blocks with uniform starts in
/// {0..T-l}, truncated to T.
[[nodiscard]] std::vector<std::size_t> block_resample(std::size_t T, std::size_t block_length, std::uint64_t seed,
                                                      std::size_t replicate_id);

/// max(1, ceil(1.75 T^{1/3})), capped at T. Requires T >= 8.
[[nodiscard]] std::size_t auto_block_length(std::size_t T);

/// Linear interpolation between order statistics: position (n - 1) p of the sorted values.
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double p);
[[nodiscard]] double quantile(std::vector<double> values, double p);

[[nodiscard]] std::pair<double, double> percentile_interval(std::span<const double> replicates, double confidence);

/// Bias-corrected and accelerated endpoints. `jackknife` holds the leave-one-block-out estimates.
[[nodiscard]] std::pair<double, double> bca_interval(std::span<const double> replicates, double point,
                                                     std::span<const double> jackknife, double confidence);
[[nodiscard]] double bca_acceleration(std::span<const double> jackknife);

/// Bootstraps one horizon. `point` is the full-sample estimate; each replicate runs
/// `replicate_estimator` on a block-resampled copy of `design`.
[[nodiscard]] ConfidenceInterval bootstrap_design(const HorizonDesign& design, double point,
                                                  const HorizonEstimator& replicate_estimator,
                                                  const BootstrapConfig& config);

/// Same with panel-row resampling: the horizon design is rebuilt on each resampled panel.
[[nodiscard]] ConfidenceInterval bootstrap_panel(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                 std::size_t horizon, double point,
                                                 const HorizonEstimator& replicate_estimator,
                                                 const BootstrapConfig& config);

/// Dispatches on config.unit.
[[nodiscard]] ConfidenceInterval bootstrap_horizon(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                   const HorizonDesign& design, double point,
                                                   const HorizonEstimator& replicate_estimator,
                                                   const BootstrapConfig& config);

struct BootstrapIrfResult {
    std::vector<IrfEstimate> estimates;
    std::vector<ConfidenceInterval> intervals;
};

/// RSLP point estimates plus intervals. Replicates keep the subspace size chosen on
/// the original sample and redraw subspaces from a replicate-keyed seed.
[[nodiscard]] BootstrapIrfResult bootstrap_irf(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                               std::span<const std::size_t> horizons, const RslpSettings& settings,
                                               const BootstrapConfig& config, std::uint64_t estimator_seed);

}  // namespace erslp
