#include "erslp/lp/design.hpp"

#include "erslp/util/error.hpp"

#include <algorithm>

namespace erslp {

HorizonDesign HorizonDesign::select_rows(std::span<const std::size_t> rows) const {
    HorizonDesign out;
    out.horizon = horizon;
    out.response.reserve(rows.size());
    out.origins.reserve(rows.size());
    for (std::size_t r : rows) {
        out.response.push_back(response[r]);
        out.origins.push_back(origins[r]);
    }
    out.shared = shared.select_rows(rows);
    out.controls = controls.select_rows(rows);
    out.shared_labels = shared_labels;
    out.control_labels = control_labels;
    out.control_categories = control_categories;
    out.relevant_controls = relevant_controls;
    return out;
}

HorizonDesign build_horizon_design(const TimeSeriesPanel& panel, const VariableRoles& roles, std::size_t horizon) {
    const ResolvedRoles idx = resolve_roles(panel, roles);
    const std::size_t t = panel.num_periods();
    const std::size_t p = idx.essential.size();
    const std::size_t min_rows = 2 + p + 2;
    if (horizon >= t || t - horizon < min_rows) {
        throw NumericalError("horizon " + std::to_string(horizon) + " infeasible: " +
                             std::to_string(horizon >= t ? 0 : t - horizon) + " usable rows, need at least " +
                             std::to_string(min_rows));
    }
    auto check_complete = [&](std::size_t col) {
        for (double v : panel.values.col(col)) {
            if (!std::isfinite(v)) {
                throw DataError("variable '" + panel.names[col] + "' has missing or non-finite values; preprocess first");
            }
        }
    };
    check_complete(idx.target);
    check_complete(idx.shock);
    for (std::size_t c : idx.essential) check_complete(c);
    for (std::size_t c : idx.controls) check_complete(c);

    const std::size_t rows = t - horizon;
    HorizonDesign d;
    d.horizon = horizon;
    d.response.resize(rows);
    d.origins.resize(rows);
    d.shared = Matrix(rows, 2 + p);
    d.controls = Matrix(rows, idx.controls.size());
    const auto y = panel.values.col(idx.target);
    for (std::size_t i = 0; i < rows; ++i) {
        d.origins[i] = i;
        d.response[i] = y[i + horizon];
    }
    std::fill(d.shared.col(kInterceptColumn).begin(), d.shared.col(kInterceptColumn).end(), 1.0);
    auto copy_head = [rows](std::span<const double> src, std::span<double> dst) {
        std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(rows), dst.begin());
    };
    copy_head(panel.values.col(idx.shock), d.shared.col(kShockColumn));
    for (std::size_t k = 0; k < p; ++k) copy_head(panel.values.col(idx.essential[k]), d.shared.col(2 + k));
    for (std::size_t k = 0; k < idx.controls.size(); ++k) copy_head(panel.values.col(idx.controls[k]), d.controls.col(k));

    d.shared_labels = {"(intercept)", roles.shock};
    d.shared_labels.insert(d.shared_labels.end(), roles.essential.begin(), roles.essential.end());
    d.control_labels = roles.high_dimensional;

    bool labelled = !roles.high_dimensional.empty();
    for (const auto& n : roles.high_dimensional) labelled = labelled && panel.categories.count(n) > 0;
    if (labelled) {
        for (const auto& n : roles.high_dimensional) d.control_categories.push_back(panel.categories.at(n));
    }
    if (panel.relevant_controls) {
        std::vector<std::size_t> rel;
        for (const auto& n : *panel.relevant_controls) {
            const auto it = std::find(roles.high_dimensional.begin(), roles.high_dimensional.end(), n);
            if (it != roles.high_dimensional.end()) rel.push_back(static_cast<std::size_t>(it - roles.high_dimensional.begin()));
        }
        std::sort(rel.begin(), rel.end());
        d.relevant_controls = std::move(rel);
    }
    return d;
}

LpProblem make_lp_problem(const HorizonDesign& design, const Subspace& subspace) {
    for (std::size_t i : subspace.indices) {
        if (i >= design.num_controls()) throw InputError("subspace index " + std::to_string(i) + " out of range");
    }
    const std::size_t p_total = design.num_shared() + subspace.size();
    if (design.rows() < p_total + 2) {
        throw NumericalError("horizon " + std::to_string(design.horizon) + " infeasible: " +
                             std::to_string(design.rows()) + " rows for " + std::to_string(p_total) + " regressors");
    }
    LpProblem prob;
    prob.horizon = design.horizon;
    prob.response = design.response;
    prob.design = Matrix::hcat(design.shared, design.controls.select_cols(subspace.indices));
    prob.column_labels = design.shared_labels;
    for (std::size_t i : subspace.indices) prob.column_labels.push_back(design.control_labels[i]);
    prob.subspace = subspace;
    prob.num_shared = design.num_shared();
    return prob;
}

LpProblem build_lp_design(const TimeSeriesPanel& panel, const VariableRoles& roles, const Subspace& subspace,
                          std::size_t horizon) {
    return make_lp_problem(build_horizon_design(panel, roles, horizon), subspace);
}

}  // namespace erslp
