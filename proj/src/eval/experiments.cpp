#include "erslp/eval/experiments.hpp"

#include "erslp/ensemble/aggregate.hpp"
#include "erslp/util/error.hpp"
#include "erslp/util/parallel.hpp"
#include "erslp/util/seed.hpp"

#include <algorithm>
#include <cmath>

namespace erslp {

void MonteCarloConfig::validate() const {
    if (n_reps < 1) throw ConfigError("montecarlo.n_reps: must be at least 1");
    if (dgps.empty()) throw ConfigError("montecarlo.dgps: must be nonempty");
    if (estimators.empty()) throw ConfigError("montecarlo.estimators: must be nonempty");
    if (horizons.empty()) throw ConfigError("montecarlo.horizons: must be nonempty");
    for (const SyntheticSpec& s : dgps) {
        s.validate();
        for (std::size_t h : horizons) {
            if (h > s.max_horizon) {
                throw ConfigError("montecarlo.horizons: horizon " + std::to_string(h) + " exceeds max_horizon " +
                                  std::to_string(s.max_horizon));
            }
        }
    }
    for (std::size_t i = 0; i < estimators.size(); ++i) {
        estimators[i].validate();
        for (std::size_t j = 0; j < i; ++j) {
            if (estimators[j].label() == estimators[i].label()) {
                throw ConfigError("montecarlo.estimators: duplicate label '" + estimators[i].label() + "'");
            }
        }
    }
    if (with_bootstrap) bootstrap.validate();
}

MeanSe mean_se(const std::vector<double>& values) {
    MeanSe out;
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    out.mean = stable_sum(values) / n;
    if (values.size() > 1) {
        std::vector<double> sq;
        for (double v : values) sq.push_back((v - out.mean) * (v - out.mean));
        out.se = std::sqrt(stable_sum(sq) / (n - 1.0)) / std::sqrt(n);
    }
    return out;
}

const MonteCarloCell& MonteCarloResult::cell(std::size_t dgp, const std::string& estimator, std::size_t horizon) const {
    for (const auto& c : cells) {
        if (c.dgp == dgp && c.estimator == estimator && c.horizon == horizon) return c;
    }
    throw InputError("MonteCarloResult: no cell for " + estimator + " at horizon " + std::to_string(horizon));
}

const MonteCarloSummary& MonteCarloResult::summary(std::size_t dgp, const std::string& estimator) const {
    for (const auto& s : summaries) {
        if (s.dgp == dgp && s.estimator == estimator) return s;
    }
    throw InputError("MonteCarloResult: no summary for " + estimator);
}

MonteCarloResult run_monte_carlo(const MonteCarloConfig& config) {
    config.validate();
    const std::size_t D = config.dgps.size();
    const std::size_t R = config.n_reps;
    const std::size_t E = config.estimators.size();
    const std::size_t H = config.horizons.size();

    std::vector<HorizonEstimator> point;
    for (const auto& e : config.estimators) point.push_back(make_horizon_estimator(e));

    // draws laid out [dgp][rep][estimator][horizon]
    std::vector<MonteCarloDraw> draws(D * R * E * H);
    parallel_for(D * R, [&](std::size_t task) {
        const std::size_t d = task / R;
        const std::size_t r = task % R;
        try {
            SyntheticSpec spec = config.dgps[d];
            spec.seed = derive_seed(config.seed, {stream::montecarlo, d, r});
            const SyntheticData data = generate_synthetic(spec);
            const std::uint64_t est_seed = derive_seed(config.seed, {stream::montecarlo, d, r, 1});
            for (std::size_t i = 0; i < H; ++i) {
                const std::size_t h = config.horizons[i];
                const HorizonDesign design = build_horizon_design(data.panel, data.roles, h);
                for (std::size_t e = 0; e < E; ++e) {
                    MonteCarloDraw& out = draws[((d * R + r) * E + e) * H + i];
                    out.dgp = d;
                    out.rep = r;
                    out.estimator = config.estimators[e].label();
                    out.horizon = h;
                    out.true_beta = data.true_irf[h];
                    const HorizonFit fit = point[e](design, est_seed);
                    out.beta = fit.estimate.beta;
                    out.subspace_std = fit.estimate.subspace_std;
                    out.selected_k = fit.estimate.selected_k;
                    if (config.with_bootstrap) {
                        BootstrapConfig bc = config.bootstrap;
                        bc.seed = derive_seed(est_seed, {stream::bootstrap});
                        const ConfidenceInterval ci =
                            bootstrap_horizon(data.panel, data.roles, design, fit.estimate.beta,
                                              make_replicate_estimator(config.estimators[e], fit), bc);
                        out.lower = ci.lower;
                        out.upper = ci.upper;
                    }
                }
            }
        } catch (const Error& err) {
            rethrow_with_context(err, "dgp " + std::to_string(d) + ", rep " + std::to_string(r));
        }
    });

    MonteCarloResult res;
    for (std::size_t d = 0; d < D; ++d) {
        for (std::size_t e = 0; e < E; ++e) {
            std::vector<double> errs(R, 0.0);
            for (std::size_t i = 0; i < H; ++i) {
                std::vector<double> beta, sqerr, sstd, ks, widths, cover;
                for (std::size_t r = 0; r < R; ++r) {
                    const MonteCarloDraw& x = draws[((d * R + r) * E + e) * H + i];
                    beta.push_back(x.beta);
                    const double se = (x.beta - x.true_beta) * (x.beta - x.true_beta);
                    sqerr.push_back(se);
                    errs[r] += se / static_cast<double>(H);
                    sstd.push_back(x.subspace_std);
                    ks.push_back(static_cast<double>(x.selected_k));
                    if (x.lower && x.upper) {
                        widths.push_back(*x.upper - *x.lower);
                        cover.push_back(*x.lower <= x.true_beta && x.true_beta <= *x.upper ? 1.0 : 0.0);
                    }
                }
                MonteCarloCell c;
                c.dgp = d;
                c.estimator = config.estimators[e].label();
                c.horizon = config.horizons[i];
                c.n_reps = R;
                c.true_beta = draws[((d * R) * E + e) * H + i].true_beta;
                c.beta = mean_se(beta);
                c.squared_error = mean_se(sqerr);
                c.subspace_std = mean_se(sstd);
                c.selected_k = mean_se(ks);
                if (!widths.empty()) {
                    c.width = mean_se(widths);
                    c.coverage = mean_se(cover);
                }
                res.cells.push_back(c);
            }
            res.summaries.push_back({d, config.estimators[e].label(), mean_se(errs)});
        }
    }
    res.draws = std::move(draws);
    return res;
}

std::string to_string(AblationToggle t) {
    switch (t) {
        case AblationToggle::weighted: return "weighted";
        case AblationToggle::category_aware: return "category_aware";
        case AblationToggle::adaptive_k: return "adaptive_k";
        case AblationToggle::bootstrap: return "bootstrap";
    }
    return "unknown";
}

AblationToggle ablation_toggle_from_string(const std::string& name) {
    for (AblationToggle t : {AblationToggle::weighted, AblationToggle::category_aware, AblationToggle::adaptive_k,
                             AblationToggle::bootstrap}) {
        if (to_string(t) == name) return t;
    }
    throw ConfigError("ablation.toggles: unknown toggle '" + name + "'");
}

EstimatorSpec ablate(const EstimatorSpec& spec, AblationToggle toggle) {
    if (spec.kind != EstimatorKind::rslp) throw ConfigError("ablation: the full configuration must be an rslp estimator");
    EstimatorSpec out = spec;
    out.name = spec.label() + "_no_" + to_string(toggle);
    switch (toggle) {
        case AblationToggle::weighted: out.rslp.weights = WeightScheme{}; break;
        case AblationToggle::category_aware: out.rslp.sampler.kind = SamplerKind::uniform; break;
        case AblationToggle::adaptive_k: out.rslp.adaptive.reset(); break;
        case AblationToggle::bootstrap: break;
    }
    return out;
}

std::vector<AblationRow> run_ablation(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                      const EstimatorSpec& full, const std::vector<AblationToggle>& toggles,
                                      const RollingWindowSpec& windows, std::span<const std::size_t> horizons,
                                      const EvalOptions& options, std::uint64_t seed) {
    if (full.kind != EstimatorKind::rslp) throw ConfigError("ablation: the full configuration must be an rslp estimator");
    for (std::size_t i = 0; i < toggles.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (toggles[i] == toggles[j]) throw ConfigError("ablation.toggles: duplicate '" + to_string(toggles[i]) + "'");
        }
    }
    windows.validate(panel.num_periods());
    EvalOptions full_opts = options;
    if (std::find(toggles.begin(), toggles.end(), AblationToggle::bootstrap) != toggles.end()) {
        full_opts.with_bootstrap = true;
    }

    std::vector<AblationRow> rows;
    rows.reserve(toggles.size() + 1);
    AblationRow base;
    base.config = "full";
    base.report = run_rolling_eval(panel, roles, full, windows, horizons, full_opts, seed);
    rows.push_back(std::move(base));
    const EvalReport& ref = rows.front().report;

    for (AblationToggle t : toggles) {
        AblationRow row;
        row.config = "no_" + to_string(t);
        row.toggle = t;
        EvalOptions opts = full_opts;
        if (t == AblationToggle::bootstrap) opts.with_bootstrap = false;
        row.report = run_rolling_eval(panel, roles, ablate(full, t), windows, horizons, opts, seed);
        for (std::size_t h : horizons) {
            row.delta_mspe[h] = row.report.mspe.at(h) - ref.mspe.at(h);
            row.delta_stability[h] = row.report.stability.at(h) - ref.stability.at(h);
            if (row.report.avg_width.count(h) && ref.avg_width.count(h)) {
                row.delta_width[h] = row.report.avg_width.at(h) - ref.avg_width.at(h);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace erslp
