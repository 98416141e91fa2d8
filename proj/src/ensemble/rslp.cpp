#include "erslp/ensemble/rslp.hpp"

#include "erslp/sampling/subspace.hpp"
#include "erslp/util/error.hpp"
#include "erslp/util/parallel.hpp"
#include "erslp/util/seed.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace erslp {

void AdaptiveKConfig::validate() const {
    if (k_min < 1) throw ConfigError("estimator.adaptive_k.k_min: must be at least 1");
    if (k_max < k_min) throw ConfigError("estimator.adaptive_k.k_max: must be >= k_min");
    if (k_step < 1) throw ConfigError("estimator.adaptive_k.k_step: must be at least 1");
    if (!(expansion_factor > 1.0) || !std::isfinite(expansion_factor)) {
        throw ConfigError("estimator.adaptive_k.expansion_factor: must be > 1");
    }
    if (!(tau > 0.0)) throw ConfigError("estimator.adaptive_k.tau: must be positive");
    if (n_folds < 2) throw ConfigError("estimator.adaptive_k.n_folds: must be at least 2");
}

void RslpSettings::validate() const {
    if (n_subspaces < 1) throw ConfigError("estimator.n_subspaces: must be at least 1");
    if (!adaptive && k < 1) throw ConfigError("estimator.k: must be at least 1");
    if (adaptive) adaptive->validate();
    weights.validate();
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
        throw ConfigError("estimator.holdout_fraction: must lie in [0, 1)");
    }
    if (weights.kind == WeightKind::inverse_mspe && holdout_fraction == 0.0) {
        throw ConfigError("estimator.weights: inverse_mspe weights need estimator.holdout_fraction > 0");
    }
}

SelectKResult select_k_with_metric(const AdaptiveKConfig& config, std::size_t q,
                                   const std::function<bool(std::size_t)>& feasible,
                                   const std::function<double(std::size_t)>& metric) {
    config.validate();
    if (config.k_min > q) {
        throw ConfigError("estimator.adaptive_k: grid infeasible, k_min = " + std::to_string(config.k_min) +
                          " exceeds q = " + std::to_string(q));
    }
    SelectKResult out;
    std::size_t k_max = std::min(config.k_max, q);
    std::size_t next = config.k_min;
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (;;) {
        for (; next <= k_max; next += config.k_step) {
            if (!feasible(next)) continue;
            const double m = metric(next);
            out.metric_curve.emplace_back(next, m);
            if (!any || m < best) {
                best = m;
                out.k_star = next;
                any = true;
            }
        }
        if (any && best < config.tau) break;
        if (out.expansions >= config.max_expansions || k_max >= q) break;
        k_max = std::min(q, static_cast<std::size_t>(std::ceil(static_cast<double>(k_max) * config.expansion_factor)));
        ++out.expansions;
    }
    if (!any) {
        throw ConfigError("estimator.adaptive_k: no feasible subspace size in [" + std::to_string(config.k_min) + ", " +
                          std::to_string(k_max) + "]");
    }
    return out;
}

namespace {

CategoryScheme make_scheme(const HorizonDesign& design, const SamplerSettings& sampler) {
    if (design.control_categories.size() != design.num_controls()) {
        throw ConfigError("estimator.sampler: stratified sampling needs a category for every control");
    }
    if (sampler.quotas.empty()) return CategoryScheme::uniform_quota(design.control_categories, 1);
    return CategoryScheme(design.control_categories, sampler.quotas);
}

std::uint64_t draw_seed(const HorizonDesign& design, std::size_t k, std::uint64_t seed) {
    return derive_seed(seed, {static_cast<std::uint64_t>(design.horizon), static_cast<std::uint64_t>(k)});
}

}  // namespace

std::vector<Subspace> draw_subspaces(const HorizonDesign& design, std::size_t k, const RslpSettings& settings,
                                     std::uint64_t seed) {
    const std::size_t q = design.num_controls();
    if (k > q) {
        throw ConfigError("estimator.k: subspace size " + std::to_string(k) + " exceeds q = " + std::to_string(q));
    }
    const std::uint64_t s = draw_seed(design, k, seed);
    if (settings.sampler.kind == SamplerKind::stratified) {
        return draw_stratified_subspaces(make_scheme(design, settings.sampler), k, settings.n_subspaces, s);
    }
    return draw_uniform_subspaces(q, k, settings.n_subspaces, s);
}

EnsembleFit fit_rslp_ensemble(const HorizonDesign& design, std::size_t k, const RslpSettings& settings,
                              std::uint64_t seed) {
    const std::vector<Subspace> draws = draw_subspaces(design, k, settings, seed);
    EnsembleFit out;
    out.fits.resize(draws.size());
    parallel_for(draws.size(), [&](std::size_t j) {
        out.fits[j] = fit_subspace(make_lp_problem(design, draws[j]), settings.holdout_fraction);
    });
    Aggregate agg = aggregate_fits(out.fits, settings.weights, design.horizon);
    out.estimate = agg.estimate;
    out.estimate.selected_k = k;
    out.weights = std::move(agg.weights);

    const std::size_t s = design.num_shared();
    const std::size_t width = s + design.num_controls();
    std::vector<std::vector<double>> terms(width);
    for (std::size_t j = 0; j < out.fits.size(); ++j) {
        const double w = out.weights[j];
        if (w == 0.0) continue;
        const SubspaceFit& f = out.fits[j];
        for (std::size_t c = 0; c < s; ++c) terms[c].push_back(w * f.coefficients[c]);
        for (std::size_t i = 0; i < f.subspace.size(); ++i) {
            terms[s + f.subspace.indices[i]].push_back(w * f.coefficients[s + i]);
        }
    }
    out.predictor.coefficients.assign(width, 0.0);
    for (std::size_t c = 0; c < width; ++c) out.predictor.coefficients[c] = stable_sum(terms[c]);
    return out;
}

double cv_mspe(const HorizonDesign& design, std::size_t k, const RslpSettings& settings, std::size_t n_folds,
               std::uint64_t seed) {
    const std::size_t n = design.rows();
    if (n_folds < 2 || n_folds > n) throw ConfigError("estimator.adaptive_k.n_folds: must lie in [2, rows]");
    std::vector<double> sq;
    sq.reserve(n);
    for (std::size_t f = 0; f < n_folds; ++f) {
        const std::size_t lo = f * n / n_folds;
        const std::size_t hi = (f + 1) * n / n_folds;
        std::vector<std::size_t> train;
        std::vector<std::size_t> test;
        for (std::size_t r = 0; r < n; ++r) (r >= lo && r < hi ? test : train).push_back(r);
        const EnsembleFit fit = fit_rslp_ensemble(design.select_rows(train), k, settings, seed);
        for (std::size_t r : test) {
            const double e = design.response[r] - fit.predictor.predict(design, r);
            sq.push_back(e * e);
        }
    }
    return stable_sum(sq) / static_cast<double>(n);
}

SelectKResult select_k(const HorizonDesign& design, const AdaptiveKConfig& config, const RslpSettings& settings,
                       std::uint64_t seed) {
    const std::size_t q = design.num_controls();
    std::function<bool(std::size_t)> feasible = [](std::size_t) { return true; };
    if (settings.sampler.kind == SamplerKind::stratified) {
        const CategoryScheme scheme = make_scheme(design, settings.sampler);
        feasible = [scheme](std::size_t k) { return scheme.feasible(k); };
    }
    return select_k_with_metric(config, q, feasible, [&](std::size_t k) {
        return cv_mspe(design, k, settings, config.n_folds, seed);
    });
}

SelectKResult select_k(const TimeSeriesPanel& panel, const VariableRoles& roles, std::size_t horizon,
                       const AdaptiveKConfig& config, const RslpSettings& settings, std::uint64_t seed) {
    return select_k(build_horizon_design(panel, roles, horizon), config, settings, seed);
}

RslpHorizonResult estimate_rslp_horizon(const HorizonDesign& design, const RslpSettings& settings,
                                        std::uint64_t seed) {
    settings.validate();
    RslpHorizonResult out;
    std::size_t k = settings.k;
    if (settings.adaptive) {
        out.selection = select_k(design, *settings.adaptive, settings, seed);
        k = out.selection->k_star;
    }
    out.ensemble = fit_rslp_ensemble(design, k, settings, seed);
    return out;
}

HorizonEstimator rslp_estimator(RslpSettings settings) {
    return [settings = std::move(settings)](const HorizonDesign& design, std::uint64_t seed) {
        RslpHorizonResult r = estimate_rslp_horizon(design, settings, seed);
        return HorizonFit{r.ensemble.estimate, std::move(r.ensemble.predictor)};
    };
}

HorizonEstimator rslp_fixed_k_estimator(RslpSettings settings, std::size_t k) {
    settings.adaptive.reset();
    settings.k = k;
    settings.validate();
    return [settings = std::move(settings), k](const HorizonDesign& design, std::uint64_t seed) {
        EnsembleFit e = fit_rslp_ensemble(design, k, settings, seed);
        return HorizonFit{e.estimate, std::move(e.predictor)};
    };
}

std::vector<IrfEstimate> estimate_rslp(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                       std::span<const std::size_t> horizons, const RslpSettings& settings,
                                       std::uint64_t seed) {
    settings.validate();
    std::vector<IrfEstimate> out(horizons.size());
    parallel_for(horizons.size(), [&](std::size_t i) {
        const std::size_t h = horizons[i];
        try {
            out[i] = estimate_rslp_horizon(build_horizon_design(panel, roles, h), settings, seed).ensemble.estimate;
        } catch (const Error& e) {
            rethrow_with_context(e, "horizon " + std::to_string(h));
        }
    });
    return out;
}

}  // namespace erslp
