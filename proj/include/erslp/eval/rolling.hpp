#pragma once

#include "erslp/benchmarks/estimators.hpp"
#include "erslp/data/panel.hpp"
#include "erslp/inference/bootstrap.hpp"
#include "erslp/lp/fit.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace erslp {

struct RollingWindowSpec {
    std::size_t train_length = 180;
    std::size_t test_length = 24;
    std::size_t step = 1;

    /// Throws ConfigError when the windows do not fit into T periods.
    void validate(std::size_t T) const;
    /// floor((T - train - test) / step) + 1
    [[nodiscard]] std::size_t window_count(std::size_t T) const;
};

/// Point and replicate estimators under one label. `replicate` maps the full-sample
/// fit of a window to the estimator its bootstrap replicates run.
struct EvalEstimator {
    std::string name;
    HorizonEstimator point;
    std::function<HorizonEstimator(const HorizonFit&)> replicate;
};

[[nodiscard]] EvalEstimator make_eval_estimator(const EstimatorSpec& spec);

enum class EvalStage { standardize, estimate, forecast };

/// Observer for the panel rows (absolute indices) each stage of a window reads.
using EvalTrace = std::function<void(std::size_t window, std::size_t horizon, EvalStage stage,
                                     std::span<const std::size_t> rows)>;

struct EvalOptions {
    bool with_bootstrap = false;
    BootstrapConfig bootstrap;
    EvalTrace trace;
};

struct WindowRecord {
    std::size_t window = 0;
    std::size_t horizon = 0;
    std::size_t train_begin = 0;
    std::size_t test_begin = 0;
    std::size_t test_end = 0;
    /// Shock coefficient in original units.
    double beta = 0.0;
    double subspace_std = 0.0;
    std::size_t selected_k = 0;
    double sse = 0.0;
    std::size_t n_forecasts = 0;
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<double> reference;
};

struct EvalReport {
    std::string estimator;
    std::vector<std::size_t> horizons;
    std::size_t n_windows = 0;
    std::map<std::size_t, double> mspe;
    std::map<std::size_t, double> mean_beta;
    std::map<std::size_t, double> stability;
    std::map<std::size_t, double> mean_subspace_std;
    std::map<std::size_t, double> coverage;
    std::map<std::size_t, double> avg_width;
    std::optional<double> irf_error;
    std::vector<WindowRecord> windows;
};

/// (1/H) sum_h (true_irf[h] - beta_h)^2; true_irf is indexed by horizon.
[[nodiscard]] double irf_error(std::span<const IrfEstimate> estimates, std::span<const double> true_irf);

[[nodiscard]] EvalReport run_rolling_eval(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                          const EvalEstimator& estimator, const RollingWindowSpec& spec,
                                          std::span<const std::size_t> horizons, const EvalOptions& options,
                                          std::uint64_t seed);
[[nodiscard]] EvalReport run_rolling_eval(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                          const EstimatorSpec& estimator, const RollingWindowSpec& spec,
                                          std::span<const std::size_t> horizons, const EvalOptions& options,
                                          std::uint64_t seed);

}  // namespace erslp
