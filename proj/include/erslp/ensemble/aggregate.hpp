#pragma once

#include "erslp/lp/fit.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace erslp {

enum class WeightKind { equal, bic, inverse_mspe, inverse_variance };

struct WeightScheme {
    WeightKind kind = WeightKind::equal;
    double lambda = 1.0;   // bic only
    double epsilon = 1e-8;  // inverse kinds

    void validate() const;
};

/// Unnormalized weights, one per fit. bic weights are min-shifted before
/// exponentiation; the shift cancels once aggregation normalizes.
[[nodiscard]] std::vector<double> compute_weights(std::span<const SubspaceFit> fits, const WeightScheme& scheme);

struct Aggregate {
    IrfEstimate estimate;
    /// Normalized weight per input fit; degenerate fits get 0.
    std::vector<double> weights;
};

/// Weighted mean of the shock coefficients over non-degenerate fits. subspace_std is the
/// unweighted sample standard deviation of those coefficients.
[[nodiscard]] Aggregate aggregate_fits(std::span<const SubspaceFit> fits, const WeightScheme& scheme,
                                       std::size_t horizon);
[[nodiscard]] IrfEstimate aggregate(std::span<const SubspaceFit> fits, const WeightScheme& scheme,
                                    std::size_t horizon);

/// Compensated (Neumaier) summation.
[[nodiscard]] double stable_sum(std::span<const double> values);

}  // namespace erslp
