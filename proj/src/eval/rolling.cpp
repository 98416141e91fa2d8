#include "erslp/eval/rolling.hpp"

#include "erslp/data/preprocess.hpp"
#include "erslp/ensemble/aggregate.hpp"
#include "erslp/util/error.hpp"
#include "erslp/util/parallel.hpp"
#include "erslp/util/seed.hpp"

#include <algorithm>
#include <cmath>

namespace erslp {

void RollingWindowSpec::validate(std::size_t T) const {
    if (train_length < 1) throw ConfigError("eval.train_length: must be at least 1");
    if (test_length < 1) throw ConfigError("eval.test_length: must be at least 1");
    if (step < 1) throw ConfigError("eval.step: must be at least 1");
    if (train_length + test_length > T) {
        throw ConfigError("eval: train_length + test_length = " + std::to_string(train_length + test_length) +
                          " exceeds T = " + std::to_string(T));
    }
}

std::size_t RollingWindowSpec::window_count(std::size_t T) const {
    validate(T);
    return (T - train_length - test_length) / step + 1;
}

EvalEstimator make_eval_estimator(const EstimatorSpec& spec) {
    EvalEstimator e;
    e.name = spec.label();
    e.point = make_horizon_estimator(spec);
    e.replicate = [spec](const HorizonFit& point) { return make_replicate_estimator(spec, point); };
    return e;
}

double irf_error(std::span<const IrfEstimate> estimates, std::span<const double> true_irf) {
    if (estimates.empty()) throw InputError("irf_error: no estimates");
    std::vector<double> sq;
    for (const IrfEstimate& e : estimates) {
        if (e.horizon >= true_irf.size()) {
            throw InputError("irf_error: no true response for horizon " + std::to_string(e.horizon));
        }
        const double d = true_irf[e.horizon] - e.beta;
        sq.push_back(d * d);
    }
    return stable_sum(sq) / static_cast<double>(estimates.size());
}

namespace {

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = stable_sum(v) / static_cast<double>(v.size());
    std::vector<double> sq;
    for (double x : v) sq.push_back((x - mean) * (x - mean));
    return std::sqrt(stable_sum(sq) / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) { return v.empty() ? 0.0 : stable_sum(v) / static_cast<double>(v.size()); }

}  // namespace

EvalReport run_rolling_eval(const TimeSeriesPanel& panel, const VariableRoles& roles, const EvalEstimator& estimator,
                            const RollingWindowSpec& spec, std::span<const std::size_t> horizons,
                            const EvalOptions& options, std::uint64_t seed) {
    const std::size_t T = panel.num_periods();
    spec.validate(T);
    if (horizons.empty()) throw ConfigError("eval.horizons: must be nonempty");
    for (std::size_t h : horizons) {
        if (h >= spec.train_length) {
            throw ConfigError("eval.horizons: horizon " + std::to_string(h) + " does not fit a train window of " +
                              std::to_string(spec.train_length));
        }
    }
    if (options.with_bootstrap) options.bootstrap.validate();
    const ResolvedRoles rr = resolve_roles(panel, roles);
    const std::size_t n_windows = spec.window_count(T);
    const std::size_t H = horizons.size();

    // Coverage reference off synthetic data: the full-sample point estimate.
    std::vector<std::optional<double>> reference(H);
    if (options.with_bootstrap) {
        if (panel.true_irf) {
            for (std::size_t i = 0; i < H; ++i) {
                if (horizons[i] < panel.true_irf->size()) reference[i] = (*panel.true_irf)[horizons[i]];
            }
        } else {
            const Standardized full = standardize(panel, 0, T);
            const double ratio = full.stats[rr.target].sd / full.stats[rr.shock].sd;
            for (std::size_t i = 0; i < H; ++i) {
                reference[i] = estimator.point(build_horizon_design(full.panel, roles, horizons[i]), seed).estimate.beta *
                               ratio;
            }
        }
    }

    std::vector<WindowRecord> records(n_windows * H);
    parallel_for(n_windows, [&](std::size_t w) {
        const std::size_t b = w * spec.step;
        const std::size_t e = b + spec.train_length;
        const std::size_t te = e + spec.test_length;
        const std::uint64_t wseed = derive_seed(seed, {static_cast<std::uint64_t>(w)});
        if (options.trace) {
            std::vector<std::size_t> rows(spec.train_length);
            for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = b + r;
            for (std::size_t h : horizons) options.trace(w, h, EvalStage::standardize, rows);
        }
        const std::vector<ColumnStats> stats = column_stats(panel, b, e);
        const TimeSeriesPanel window = apply_standardization(panel.slice_rows(b, te), stats);
        const TimeSeriesPanel train = window.slice_rows(0, spec.train_length);
        const double sd_y = stats[rr.target].sd;
        const double ratio = sd_y / stats[rr.shock].sd;

        for (std::size_t i = 0; i < H; ++i) {
            const std::size_t h = horizons[i];
            WindowRecord& rec = records[w * H + i];
            rec.window = w;
            rec.horizon = h;
            rec.train_begin = b;
            rec.test_begin = e;
            rec.test_end = te;
            try {
                const HorizonDesign design = build_horizon_design(train, roles, h);
                if (options.trace) {
                    std::vector<std::size_t> rows;
                    for (std::size_t t : design.origins) {
                        rows.push_back(b + t);
                        rows.push_back(b + t + h);
                    }
                    options.trace(w, h, EvalStage::estimate, rows);
                }
                const HorizonFit fit = estimator.point(design, wseed);
                rec.beta = fit.estimate.beta * ratio;
                rec.subspace_std = fit.estimate.subspace_std * ratio;
                rec.selected_k = fit.estimate.selected_k;

                const HorizonDesign all = build_horizon_design(window, roles, h);
                std::vector<std::size_t> test_rows;
                for (std::size_t r = 0; r < all.rows(); ++r) {
                    if (all.origins[r] + h >= spec.train_length) test_rows.push_back(r);
                }
                const HorizonDesign test = all.select_rows(test_rows);
                if (options.trace) {
                    std::vector<std::size_t> rows;
                    for (std::size_t t : test.origins) {
                        rows.push_back(b + t);
                        rows.push_back(b + t + h);
                    }
                    options.trace(w, h, EvalStage::forecast, rows);
                }
                const std::vector<double> pred = fit.predictor.predict_all(test);
                std::vector<double> sq(test.rows());
                for (std::size_t r = 0; r < test.rows(); ++r) {
                    const double err = (pred[r] - test.response[r]) * sd_y;
                    sq[r] = err * err;
                }
                rec.sse = stable_sum(sq);
                rec.n_forecasts = test.rows();

                if (options.with_bootstrap) {
                    BootstrapConfig cfg = options.bootstrap;
                    cfg.seed = derive_seed(options.bootstrap.seed, {static_cast<std::uint64_t>(w)});
                    const ConfidenceInterval ci =
                        bootstrap_horizon(train, roles, design, fit.estimate.beta, estimator.replicate(fit), cfg);
                    rec.lower = ci.lower * ratio;
                    rec.upper = ci.upper * ratio;
                    rec.reference = reference[i];
                }
            } catch (const Error& err) {
                rethrow_with_context(err, "window " + std::to_string(w) + ", horizon " + std::to_string(h));
            }
        }
    });

    EvalReport rep;
    rep.estimator = estimator.name;
    rep.horizons.assign(horizons.begin(), horizons.end());
    rep.n_windows = n_windows;
    for (std::size_t i = 0; i < H; ++i) {
        const std::size_t h = horizons[i];
        std::vector<double> sse;
        std::vector<double> betas;
        std::vector<double> stds;
        std::vector<double> widths;
        std::size_t n = 0;
        std::size_t covered = 0;
        std::size_t checked = 0;
        for (std::size_t w = 0; w < n_windows; ++w) {
            const WindowRecord& r = records[w * H + i];
            sse.push_back(r.sse);
            n += r.n_forecasts;
            betas.push_back(r.beta);
            stds.push_back(r.subspace_std);
            if (r.lower && r.upper) {
                widths.push_back(*r.upper - *r.lower);
                if (r.reference) {
                    ++checked;
                    covered += (*r.lower <= *r.reference && *r.reference <= *r.upper) ? 1 : 0;
                }
            }
        }
        rep.mspe[h] = n > 0 ? stable_sum(sse) / static_cast<double>(n) : 0.0;
        rep.mean_beta[h] = mean_of(betas);
        rep.stability[h] = sample_sd(betas);
        rep.mean_subspace_std[h] = mean_of(stds);
        if (!widths.empty()) rep.avg_width[h] = mean_of(widths);
        if (checked > 0) rep.coverage[h] = static_cast<double>(covered) / static_cast<double>(checked);
    }
    if (panel.true_irf) {
        std::vector<double> errs;
        for (std::size_t w = 0; w < n_windows; ++w) {
            std::vector<IrfEstimate> est;
            for (std::size_t i = 0; i < H; ++i) {
                IrfEstimate e;
                e.horizon = horizons[i];
                e.beta = records[w * H + i].beta;
                est.push_back(e);
            }
            errs.push_back(irf_error(est, *panel.true_irf));
        }
        rep.irf_error = mean_of(errs);
    }
    rep.windows = std::move(records);
    return rep;
}

EvalReport run_rolling_eval(const TimeSeriesPanel& panel, const VariableRoles& roles, const EstimatorSpec& estimator,
                            const RollingWindowSpec& spec, std::span<const std::size_t> horizons,
                            const EvalOptions& options, std::uint64_t seed) {
    return run_rolling_eval(panel, roles, make_eval_estimator(estimator), spec, horizons, options, seed);
}

}  // namespace erslp
