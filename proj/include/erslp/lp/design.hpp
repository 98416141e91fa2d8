#pragma once

#include "erslp/data/panel.hpp"
#include "erslp/linalg/matrix.hpp"
#include "erslp/sampling/subspace.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace erslp {

/// Column layout shared by every LP design: intercept, shock, essential controls.
inline constexpr std::size_t kInterceptColumn = 0;
inline constexpr std::size_t kShockColumn = 1;

/// Everything needed to fit any LP variant at one horizon: response y_{t+h} and
/// regressors dated t, for every usable origin t. Subspace designs are column
/// selections of `controls`.
struct HorizonDesign {
    std::size_t horizon = 0;
    std::vector<double> response;
    Matrix shared;    // T_eff x (2 + p): 1, x_t, V_t
    Matrix controls;  // T_eff x q: G_t
    /// Panel row t of each design row.
    std::vector<std::size_t> origins;
    std::vector<std::string> shared_labels;
    std::vector<std::string> control_labels;
    /// Category label per control, empty when the panel has no complete labelling.
    std::vector<std::string> control_categories;
    /// Indices into controls that enter the simulated DGP (synthetic panels only).
    std::optional<std::vector<std::size_t>> relevant_controls;

    [[nodiscard]] std::size_t rows() const noexcept { return response.size(); }
    [[nodiscard]] std::size_t num_shared() const noexcept { return shared.cols(); }
    [[nodiscard]] std::size_t num_controls() const noexcept { return controls.cols(); }

    /// Row subset (bootstrap replicates, CV folds); metadata is carried over.
    [[nodiscard]] HorizonDesign select_rows(std::span<const std::size_t> rows) const;
};

/// One subspace regression: design columns [1, x_t, V_t, G_t restricted to subspace].
struct LpProblem {
    std::size_t horizon = 0;
    std::vector<double> response;
    Matrix design;
    std::vector<std::string> column_labels;
    Subspace subspace;
    std::size_t num_shared = 0;

    [[nodiscard]] std::size_t rows() const noexcept { return response.size(); }
};

/// Builds the horizon-h design from a preprocessed panel. Requires
/// T - h >= 2 + p + 2 so that at least the empty-subspace regression is identified.
[[nodiscard]] HorizonDesign build_horizon_design(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                 std::size_t horizon);

/// Restricts a horizon design to one subspace; checks T_eff >= p_total + 2.
[[nodiscard]] LpProblem make_lp_problem(const HorizonDesign& design, const Subspace& subspace);

[[nodiscard]] LpProblem build_lp_design(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                        const Subspace& subspace, std::size_t horizon);

}  // namespace erslp
