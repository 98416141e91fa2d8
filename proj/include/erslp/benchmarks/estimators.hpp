#pragma once

#include "erslp/data/panel.hpp"
#include "erslp/ensemble/rslp.hpp"
#include "erslp/linalg/solvers.hpp"
#include "erslp/lp/design.hpp"
#include "erslp/lp/fit.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace erslp {

enum class EstimatorKind { rslp, base_rslp, factor_lp, ridge_lp, elastic_net_lp, oracle_lp };

[[nodiscard]] std::string to_string(EstimatorKind kind);
/// Throws ConfigError for unknown names.
[[nodiscard]] EstimatorKind estimator_kind_from_string(const std::string& name);

struct FactorParams {
    std::size_t n_factors = 8;
};

struct RidgeParams {
    /// Candidate penalties; a single entry is used as is, several are chosen by blocked
    /// CV. Empty selects {0.1, 1, 10, 100} * q.
    std::vector<double> penalties;
    std::size_t n_folds = 5;
};

struct ElasticNetParams {
    /// Candidate l1 strengths; empty selects 5 log-spaced points on [1e-3, 1].
    std::vector<double> l1;
    /// l2 = l1 when absent.
    std::optional<double> l2;
    std::size_t n_folds = 5;
    ElasticNetOptions solver;
};

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::rslp;
    /// Label in tables; defaults to the kind name.
    std::string name;
    RslpSettings rslp;
    FactorParams factor;
    RidgeParams ridge;
    ElasticNetParams elastic_net;
    /// Overrides the design's relevant-control annotation for oracle_lp.
    std::optional<std::vector<std::size_t>> oracle_controls;

    [[nodiscard]] std::string label() const { return name.empty() ? to_string(kind) : name; }
    void validate() const;
};

/// OLS LP on [1, x, V] plus the listed controls.
[[nodiscard]] HorizonFit fit_ols_lp(const HorizonDesign& design, std::span<const std::size_t> controls);

[[nodiscard]] HorizonFit fit_factor_lp(const HorizonDesign& design, const FactorParams& params);
[[nodiscard]] HorizonFit fit_ridge_lp(const HorizonDesign& design, double penalty);
[[nodiscard]] HorizonFit fit_ridge_lp(const HorizonDesign& design, const RidgeParams& params);
[[nodiscard]] HorizonFit fit_elastic_net_lp(const HorizonDesign& design, double l1, double l2,
                                            const ElasticNetOptions& options = {});
[[nodiscard]] HorizonFit fit_elastic_net_lp(const HorizonDesign& design, const ElasticNetParams& params);
[[nodiscard]] HorizonFit fit_oracle_lp(const HorizonDesign& design,
                                       const std::optional<std::vector<std::size_t>>& controls = std::nullopt);

[[nodiscard]] std::vector<double> default_ridge_grid(std::size_t q);
[[nodiscard]] std::vector<double> default_elastic_net_grid();

/// Pooled MSPE over contiguous folds for a deterministic fitter.
[[nodiscard]] double blocked_cv_mspe(const HorizonDesign& design, std::size_t n_folds,
                                     const std::function<LinearPredictor(const HorizonDesign&)>& fitter);

[[nodiscard]] RslpSettings base_rslp_settings(std::size_t k, std::size_t n_subspaces);

[[nodiscard]] HorizonEstimator make_horizon_estimator(const EstimatorSpec& spec);

/// Estimator for bootstrap replicates given the full-sample fit: adaptive RSLP
/// keeps the selected k, everything else re-runs unchanged.
[[nodiscard]] HorizonEstimator make_replicate_estimator(const EstimatorSpec& spec, const HorizonFit& point);

[[nodiscard]] std::vector<IrfEstimate> estimate_irf(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                    std::span<const std::size_t> horizons,
                                                    const EstimatorSpec& spec, std::uint64_t seed);

[[nodiscard]] std::vector<IrfEstimate> estimate_base_rslp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                          std::span<const std::size_t> horizons, std::size_t k,
                                                          std::size_t n_subspaces, std::uint64_t seed);
[[nodiscard]] std::vector<IrfEstimate> estimate_factor_lp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                          std::span<const std::size_t> horizons,
                                                          const FactorParams& params);
[[nodiscard]] std::vector<IrfEstimate> estimate_ridge_lp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                         std::span<const std::size_t> horizons,
                                                         const RidgeParams& params);
[[nodiscard]] std::vector<IrfEstimate> estimate_elastic_net_lp(const TimeSeriesPanel& panel,
                                                               const VariableRoles& roles,
                                                               std::span<const std::size_t> horizons,
                                                               const ElasticNetParams& params);
[[nodiscard]] std::vector<IrfEstimate> estimate_oracle_lp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                          std::span<const std::size_t> horizons,
                                                          const std::optional<std::vector<std::size_t>>& controls =
                                                              std::nullopt);

}  // namespace erslp
