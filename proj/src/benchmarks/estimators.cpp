#include "erslp/benchmarks/estimators.hpp"

#include "erslp/ensemble/aggregate.hpp"
#include "erslp/util/error.hpp"
#include "erslp/util/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace erslp {

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::rslp: return "rslp";
        case EstimatorKind::base_rslp: return "base_rslp";
        case EstimatorKind::factor_lp: return "factor_lp";
        case EstimatorKind::ridge_lp: return "ridge_lp";
        case EstimatorKind::elastic_net_lp: return "elastic_net_lp";
        case EstimatorKind::oracle_lp: return "oracle_lp";
    }
    return "unknown";
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
    for (EstimatorKind k : {EstimatorKind::rslp, EstimatorKind::base_rslp, EstimatorKind::factor_lp,
                            EstimatorKind::ridge_lp, EstimatorKind::elastic_net_lp, EstimatorKind::oracle_lp}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("estimator.kind: unknown estimator '" + name + "'");
}

void EstimatorSpec::validate() const {
    switch (kind) {
        case EstimatorKind::rslp:
        case EstimatorKind::base_rslp: rslp.validate(); break;
        case EstimatorKind::factor_lp:
            if (factor.n_factors < 1) throw ConfigError("estimator.n_factors: must be at least 1");
            break;
        case EstimatorKind::ridge_lp:
            for (double p : ridge.penalties) {
                if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("estimator.ridge.penalties: must be >= 0");
            }
            if (ridge.penalties.size() > 1 && ridge.n_folds < 2) {
                throw ConfigError("estimator.ridge.n_folds: must be at least 2");
            }
            break;
        case EstimatorKind::elastic_net_lp:
            for (double p : elastic_net.l1) {
                if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("estimator.elastic_net.l1: must be >= 0");
            }
            if (elastic_net.l2 && !(*elastic_net.l2 >= 0.0)) {
                throw ConfigError("estimator.elastic_net.l2: must be >= 0");
            }
            if (elastic_net.l1.size() != 1 && elastic_net.n_folds < 2) {
                throw ConfigError("estimator.elastic_net.n_folds: must be at least 2");
            }
            break;
        case EstimatorKind::oracle_lp: break;
    }
}

namespace {

IrfEstimate single_estimate(const HorizonDesign& design, double beta, std::size_t n_controls) {
    IrfEstimate e;
    e.horizon = design.horizon;
    e.beta = beta;
    e.subspace_std = 0.0;
    e.n_effective = 1;
    e.selected_k = n_controls;
    e.weights_entropy = 0.0;
    return e;
}

void require_rows(const HorizonDesign& design, std::size_t cols, const char* what) {
    if (design.rows() < cols + 2) {
        throw NumericalError("horizon " + std::to_string(design.horizon) + " infeasible for " + what + ": " +
                             std::to_string(design.rows()) + " rows for " + std::to_string(cols) + " regressors");
    }
}

std::vector<std::size_t> control_block(const HorizonDesign& design) {
    std::vector<std::size_t> cols(design.num_controls());
    std::iota(cols.begin(), cols.end(), design.num_shared());
    return cols;
}

template <class Fit>
std::size_t pick_by_cv(const HorizonDesign& design, std::span<const double> grid, std::size_t n_folds, Fit fit) {
    std::size_t best = 0;
    double best_m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double m = blocked_cv_mspe(design, n_folds, [&](const HorizonDesign& d) { return fit(d, grid[i]); });
        if (m < best_m) {
            best_m = m;
            best = i;
        }
    }
    return best;
}

}  // namespace

double blocked_cv_mspe(const HorizonDesign& design, std::size_t n_folds,
                       const std::function<LinearPredictor(const HorizonDesign&)>& fitter) {
    const std::size_t n = design.rows();
    if (n_folds < 2 || n_folds > n) throw ConfigError("n_folds: must lie in [2, rows]");
    std::vector<double> sq;
    sq.reserve(n);
    for (std::size_t f = 0; f < n_folds; ++f) {
        const std::size_t lo = f * n / n_folds;
        const std::size_t hi = (f + 1) * n / n_folds;
        std::vector<std::size_t> train;
        for (std::size_t r = 0; r < n; ++r) {
            if (r < lo || r >= hi) train.push_back(r);
        }
        const LinearPredictor p = fitter(design.select_rows(train));
        for (std::size_t r = lo; r < hi; ++r) {
            const double e = design.response[r] - p.predict(design, r);
            sq.push_back(e * e);
        }
    }
    return stable_sum(sq) / static_cast<double>(n);
}

HorizonFit fit_ols_lp(const HorizonDesign& design, std::span<const std::size_t> controls) {
    const std::size_t s = design.num_shared();
    for (std::size_t i : controls) {
        if (i >= design.num_controls()) throw InputError("fit_ols_lp: control index out of range");
    }
    require_rows(design, s + controls.size(), "OLS LP");
    const Matrix x = Matrix::hcat(design.shared, design.controls.select_cols(controls));
    const RegressionFit fit = ols_fit(x, design.response);
    HorizonFit out;
    out.estimate = single_estimate(design, fit.coefficients[kShockColumn], controls.size());
    out.predictor.coefficients.assign(s + design.num_controls(), 0.0);
    for (std::size_t j = 0; j < s; ++j) out.predictor.coefficients[j] = fit.coefficients[j];
    for (std::size_t i = 0; i < controls.size(); ++i) out.predictor.coefficients[s + controls[i]] = fit.coefficients[s + i];
    return out;
}

HorizonFit fit_factor_lp(const HorizonDesign& design, const FactorParams& params) {
    const std::size_t q = design.num_controls();
    const std::size_t n = design.rows();
    const std::size_t s = design.num_shared();
    if (params.n_factors < 1) throw ConfigError("estimator.n_factors: must be at least 1");
    if (params.n_factors > std::min(n, q)) {
        throw ConfigError("estimator.n_factors: " + std::to_string(params.n_factors) + " exceeds min(rows, q) = " +
                          std::to_string(std::min(n, q)));
    }
    require_rows(design, s + params.n_factors, "factor LP");

    std::vector<double> mean(q);
    std::vector<double> sd(q);
    Matrix z(n, q);
    for (std::size_t j = 0; j < q; ++j) {
        const auto c = design.controls.col(j);
        mean[j] = stable_sum(c) / static_cast<double>(n);
        std::vector<double> dev(n);
        for (std::size_t r = 0; r < n; ++r) dev[r] = (c[r] - mean[j]) * (c[r] - mean[j]);
        const double v = n > 1 ? stable_sum(dev) / static_cast<double>(n - 1) : 0.0;
        sd[j] = v > 0.0 ? std::sqrt(v) : 1.0;
        for (std::size_t r = 0; r < n; ++r) z(r, j) = (c[r] - mean[j]) / sd[j];
    }
    const PrincipalComponents pc = principal_components(z, params.n_factors);
    const Matrix x = Matrix::hcat(design.shared, pc.factors);
    const RegressionFit fit = ols_fit(x, design.response);

    // factor_f = sum_j L_jf (g_j - mean_j) / sd_j - sum_j L_jf zmean_j, zmean = 0 up to rounding
    HorizonFit out;
    out.estimate = single_estimate(design, fit.coefficients[kShockColumn], params.n_factors);
    std::vector<double>& b = out.predictor.coefficients;
    b.assign(s + q, 0.0);
    for (std::size_t j = 0; j < s; ++j) b[j] = fit.coefficients[j];
    for (std::size_t f = 0; f < params.n_factors; ++f) {
        const double c = fit.coefficients[s + f];
        double shift = 0.0;
        for (std::size_t j = 0; j < q; ++j) {
            const double w = c * pc.loadings(j, f) / sd[j];
            b[s + j] += w;
            shift += w * mean[j] + c * pc.loadings(j, f) * pc.column_means[j];
        }
        b[kInterceptColumn] -= shift;
    }
    return out;
}

HorizonFit fit_ridge_lp(const HorizonDesign& design, double penalty) {
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw ConfigError("estimator.ridge.penalties: must be >= 0");
    const Matrix x = Matrix::hcat(design.shared, design.controls);
    const std::vector<std::size_t> pen = control_block(design);
    if (penalty == 0.0) require_rows(design, x.cols(), "ridge LP at penalty 0");
    const RegressionFit fit = ridge_fit(x, design.response, penalty, pen);
    HorizonFit out;
    out.estimate = single_estimate(design, fit.coefficients[kShockColumn], design.num_controls());
    out.predictor.coefficients = fit.coefficients;
    return out;
}

std::vector<double> default_ridge_grid(std::size_t q) {
    const double qd = static_cast<double>(q);
    return {0.1 * qd, 1.0 * qd, 10.0 * qd, 100.0 * qd};
}

HorizonFit fit_ridge_lp(const HorizonDesign& design, const RidgeParams& params) {
    const std::vector<double> grid = params.penalties.empty() ? default_ridge_grid(design.num_controls())
                                                              : params.penalties;
    if (grid.size() == 1) return fit_ridge_lp(design, grid.front());
    const std::size_t best = pick_by_cv(design, grid, params.n_folds, [](const HorizonDesign& d, double p) {
        return fit_ridge_lp(d, p).predictor;
    });
    return fit_ridge_lp(design, grid[best]);
}

HorizonFit fit_elastic_net_lp(const HorizonDesign& design, double l1, double l2, const ElasticNetOptions& options) {
    const Matrix x = Matrix::hcat(design.shared, design.controls);
    const std::vector<std::size_t> pen = control_block(design);
    const RegressionFit fit = elastic_net_fit(x, design.response, l1, l2, pen, options);
    HorizonFit out;
    std::size_t active = 0;
    for (std::size_t j : pen) active += fit.coefficients[j] != 0.0 ? 1 : 0;
    out.estimate = single_estimate(design, fit.coefficients[kShockColumn], active);
    out.predictor.coefficients = fit.coefficients;
    return out;
}

std::vector<double> default_elastic_net_grid() {
    std::vector<double> g;
    for (int i = 0; i < 5; ++i) g.push_back(std::pow(10.0, -3.0 + 0.75 * i));
    return g;
}

HorizonFit fit_elastic_net_lp(const HorizonDesign& design, const ElasticNetParams& params) {
    const std::vector<double> grid = params.l1.empty() ? default_elastic_net_grid() : params.l1;
    auto fit = [&](const HorizonDesign& d, double l1) {
        return fit_elastic_net_lp(d, l1, params.l2 ? *params.l2 : l1, params.solver);
    };
    if (grid.size() == 1) return fit(design, grid.front());
    const std::size_t best =
        pick_by_cv(design, grid, params.n_folds, [&](const HorizonDesign& d, double l1) { return fit(d, l1).predictor; });
    return fit(design, grid[best]);
}

HorizonFit fit_oracle_lp(const HorizonDesign& design, const std::optional<std::vector<std::size_t>>& controls) {
    const std::optional<std::vector<std::size_t>>& set = controls ? controls : design.relevant_controls;
    if (!set) {
        throw ConfigError("estimator.kind: oracle_lp needs a panel with known relevant controls (synthetic data)");
    }
    std::vector<std::size_t> idx = *set;
    std::sort(idx.begin(), idx.end());
    return fit_ols_lp(design, idx);
}

RslpSettings base_rslp_settings(std::size_t k, std::size_t n_subspaces) {
    RslpSettings s;
    s.k = k;
    s.n_subspaces = n_subspaces;
    s.adaptive.reset();
    s.weights = WeightScheme{};
    s.sampler = SamplerSettings{};
    s.holdout_fraction = 0.0;
    return s;
}

HorizonEstimator make_horizon_estimator(const EstimatorSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case EstimatorKind::rslp: return rslp_estimator(spec.rslp);
        case EstimatorKind::base_rslp:
            return rslp_estimator(base_rslp_settings(spec.rslp.k, spec.rslp.n_subspaces));
        case EstimatorKind::factor_lp:
            return [p = spec.factor](const HorizonDesign& d, std::uint64_t) { return fit_factor_lp(d, p); };
        case EstimatorKind::ridge_lp:
            return [p = spec.ridge](const HorizonDesign& d, std::uint64_t) { return fit_ridge_lp(d, p); };
        case EstimatorKind::elastic_net_lp:
            return [p = spec.elastic_net](const HorizonDesign& d, std::uint64_t) { return fit_elastic_net_lp(d, p); };
        case EstimatorKind::oracle_lp:
            return [c = spec.oracle_controls](const HorizonDesign& d, std::uint64_t) { return fit_oracle_lp(d, c); };
    }
    throw ConfigError("estimator.kind: unsupported");
}

HorizonEstimator make_replicate_estimator(const EstimatorSpec& spec, const HorizonFit& point) {
    if (spec.kind == EstimatorKind::rslp && spec.rslp.adaptive) {
        return rslp_fixed_k_estimator(spec.rslp, point.estimate.selected_k);
    }
    return make_horizon_estimator(spec);
}

std::vector<IrfEstimate> estimate_irf(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                      std::span<const std::size_t> horizons, const EstimatorSpec& spec,
                                      std::uint64_t seed) {
    const HorizonEstimator est = make_horizon_estimator(spec);
    std::vector<IrfEstimate> out(horizons.size());
    parallel_for(horizons.size(), [&](std::size_t i) {
        const std::size_t h = horizons[i];
        try {
            out[i] = est(build_horizon_design(panel, roles, h), seed).estimate;
        } catch (const Error& e) {
            rethrow_with_context(e, "horizon " + std::to_string(h));
        }
    });
    return out;
}

std::vector<IrfEstimate> estimate_base_rslp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                            std::span<const std::size_t> horizons, std::size_t k,
                                            std::size_t n_subspaces, std::uint64_t seed) {
    return estimate_rslp(panel, roles, horizons, base_rslp_settings(k, n_subspaces), seed);
}

std::vector<IrfEstimate> estimate_factor_lp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                            std::span<const std::size_t> horizons, const FactorParams& params) {
    EstimatorSpec s;
    s.kind = EstimatorKind::factor_lp;
    s.factor = params;
    return estimate_irf(panel, roles, horizons, s, 0);
}

std::vector<IrfEstimate> estimate_ridge_lp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                           std::span<const std::size_t> horizons, const RidgeParams& params) {
    EstimatorSpec s;
    s.kind = EstimatorKind::ridge_lp;
    s.ridge = params;
    return estimate_irf(panel, roles, horizons, s, 0);
}

std::vector<IrfEstimate> estimate_elastic_net_lp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                                 std::span<const std::size_t> horizons,
                                                 const ElasticNetParams& params) {
    EstimatorSpec s;
    s.kind = EstimatorKind::elastic_net_lp;
    s.elastic_net = params;
    return estimate_irf(panel, roles, horizons, s, 0);
}

std::vector<IrfEstimate> estimate_oracle_lp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                            std::span<const std::size_t> horizons,
                                            const std::optional<std::vector<std::size_t>>& controls) {
    EstimatorSpec s;
    s.kind = EstimatorKind::oracle_lp;
    s.oracle_controls = controls;
    return estimate_irf(panel, roles, horizons, s, 0);
}

}  // namespace erslp
