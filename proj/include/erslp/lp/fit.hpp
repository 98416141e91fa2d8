#pragma once

#include "erslp/lp/design.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace erslp {

struct SubspaceFit {
    double beta_h = 0.0;
    double bic = 0.0;
    double insample_rss = 0.0;
    std::optional<double> oos_mspe;
    /// sigma^2 [(X'X)^{-1}]_{shock, shock}
    double beta_variance = 0.0;
    Subspace subspace;
    bool degenerate = false;
    /// Coefficients in LpProblem column order.
    std::vector<double> coefficients;
};

/// OLS on the first (1 - holdout_fraction) of the rows; the remaining tail, when
/// nonempty, scores oos_mspe. Rank-deficient designs and designs without residual
/// degrees of freedom come back flagged degenerate instead of throwing.
[[nodiscard]] SubspaceFit fit_subspace(const LpProblem& problem, double holdout_fraction = 0.0);

/// Linear forecast rule over a HorizonDesign row: coefficients for the shared columns
/// followed by one per control (zero for controls a model does not use).
struct LinearPredictor {
    std::vector<double> coefficients;

    [[nodiscard]] double predict(const HorizonDesign& design, std::size_t row) const;
    [[nodiscard]] std::vector<double> predict_all(const HorizonDesign& design) const;
};

/// Per-horizon aggregated impulse response.
struct IrfEstimate {
    std::size_t horizon = 0;
    double beta = 0.0;
    double subspace_std = 0.0;
    std::size_t n_effective = 1;
    std::size_t selected_k = 0;
    double weights_entropy = 0.0;
};

struct HorizonFit {
    IrfEstimate estimate;
    LinearPredictor predictor;
};

/// Any estimator reduced to its per-horizon core. The seed keys all internal randomness.
using HorizonEstimator = std::function<HorizonFit(const HorizonDesign&, std::uint64_t seed)>;

}  // namespace erslp
