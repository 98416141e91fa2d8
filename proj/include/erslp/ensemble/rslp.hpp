#pragma once

#include "erslp/data/panel.hpp"
#include "erslp/ensemble/aggregate.hpp"
#include "erslp/lp/design.hpp"
#include "erslp/lp/fit.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace erslp {

enum class SamplerKind { uniform, stratified };

struct SamplerSettings {
    SamplerKind kind = SamplerKind::uniform;
    /// Minimum members per category; empty means one per category.
    std::map<std::string, std::size_t> quotas;
};

/// Per-horizon subspace-size search. k_max is capped at q when the scan starts.
struct AdaptiveKConfig {
    std::size_t k_min = 2;
    std::size_t k_max = 20;
    std::size_t k_step = 1;
    double expansion_factor = 1.5;
    double tau = std::numeric_limits<double>::infinity();
    std::size_t n_folds = 5;
    std::size_t max_expansions = 2;

    void validate() const;
};

struct RslpSettings {
    std::size_t n_subspaces = 100;
    std::size_t k = 10;
    std::optional<AdaptiveKConfig> adaptive;
    WeightScheme weights;
    SamplerSettings sampler;
    double holdout_fraction = 0.0;

    void validate() const;
};

struct SelectKResult {
    std::size_t k_star = 0;
    /// (k, metric) in scan order.
    std::vector<std::pair<std::size_t, double>> metric_curve;
    std::size_t expansions = 0;
};

/// Grid scan with expansion; `metric` is evaluated once per feasible candidate.
/// Ties resolve to the smallest k.
[[nodiscard]] SelectKResult select_k_with_metric(const AdaptiveKConfig& config, std::size_t q,
                                                 const std::function<bool(std::size_t)>& feasible,
                                                 const std::function<double(std::size_t)>& metric);

struct EnsembleFit {
    IrfEstimate estimate;
    std::vector<SubspaceFit> fits;
    std::vector<double> weights;
    LinearPredictor predictor;
};

[[nodiscard]] std::vector<Subspace> draw_subspaces(const HorizonDesign& design, std::size_t k,
                                                   const RslpSettings& settings, std::uint64_t seed);

/// Fits n_subspaces draws of size k and aggregates them. The predictor is the
/// weighted average of the zero-padded subspace coefficient vectors.
[[nodiscard]] EnsembleFit fit_rslp_ensemble(const HorizonDesign& design, std::size_t k,
                                            const RslpSettings& settings, std::uint64_t seed);

/// Blocked K-fold cross-validated MSPE of the size-k ensemble.
[[nodiscard]] double cv_mspe(const HorizonDesign& design, std::size_t k, const RslpSettings& settings,
                             std::size_t n_folds, std::uint64_t seed);

[[nodiscard]] SelectKResult select_k(const HorizonDesign& design, const AdaptiveKConfig& config,
                                     const RslpSettings& settings, std::uint64_t seed);
[[nodiscard]] SelectKResult select_k(const TimeSeriesPanel& panel, const VariableRoles& roles, std::size_t horizon,
                                     const AdaptiveKConfig& config, const RslpSettings& settings,
                                     std::uint64_t seed);

struct RslpHorizonResult {
    EnsembleFit ensemble;
    std::optional<SelectKResult> selection;
};

/// Adaptive or fixed k, then the ensemble at that k.
[[nodiscard]] RslpHorizonResult estimate_rslp_horizon(const HorizonDesign& design, const RslpSettings& settings,
                                                      std::uint64_t seed);

/// k fixed in advance (bootstrap replicates reuse the k picked on the original sample).
[[nodiscard]] HorizonEstimator rslp_estimator(RslpSettings settings);
[[nodiscard]] HorizonEstimator rslp_fixed_k_estimator(RslpSettings settings, std::size_t k);

[[nodiscard]] std::vector<IrfEstimate> estimate_rslp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                     std::span<const std::size_t> horizons,
                                                     const RslpSettings& settings, std::uint64_t seed);

}  // namespace erslp
