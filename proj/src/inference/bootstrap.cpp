#include "erslp/inference/bootstrap.hpp"

#include "erslp/ensemble/aggregate.hpp"
#include "erslp/util/error.hpp"
#include "erslp/util/parallel.hpp"
#include "erslp/util/seed.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace erslp {

void BootstrapConfig::validate() const {
    if (B < 2) throw ConfigError("inference.B: must be at least 2");
    if (block_length && *block_length < 1) throw ConfigError("inference.block_length: must be at least 1");
    if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("inference.confidence: must lie in (0, 1)");
}

std::string to_string(IntervalMethod m) { return m == IntervalMethod::bca ? "bca" : "percentile"; }

std::vector<std::size_t> block_resample(std::size_t T, std::size_t block_length, std::uint64_t seed,
                                        std::size_t replicate_id) {
    if (T == 0) throw InputError("block_resample: T must be positive");
    if (block_length < 1 || block_length > T) {
        throw InputError("block_resample: block_length " + std::to_string(block_length) + " outside [1, " +
                         std::to_string(T) + "]");
    }
    Rng rng = make_rng(seed, {stream::bootstrap, static_cast<std::uint64_t>(replicate_id)});
    std::uniform_int_distribution<std::size_t> start(0, T - block_length);
    std::vector<std::size_t> out;
    out.reserve(T);
    while (out.size() < T) {
        const std::size_t s = start(rng);
        for (std::size_t i = 0; i < block_length && out.size() < T; ++i) out.push_back(s + i);
    }
    return out;
}

std::size_t auto_block_length(std::size_t T) {
    if (T < 8) throw InputError("auto_block_length: need T >= 8, got " + std::to_string(T));
    const double l = std::ceil(1.75 * std::cbrt(static_cast<double>(T)) - 1e-12);
    return std::min<std::size_t>(T, std::max<std::size_t>(1, static_cast<std::size_t>(l)));
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InputError("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile: probability outside [0, 1]");
    const double pos = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, p);
}

std::pair<double, double> percentile_interval(std::span<const double> replicates, double confidence) {
    std::vector<double> s(replicates.begin(), replicates.end());
    std::sort(s.begin(), s.end());
    const double alpha = 1.0 - confidence;
    return {quantile_sorted(s, alpha / 2.0), quantile_sorted(s, 1.0 - alpha / 2.0)};
}

double bca_acceleration(std::span<const double> jackknife) {
    if (jackknife.size() < 2) return 0.0;
    const double mean = stable_sum(jackknife) / static_cast<double>(jackknife.size());
    std::vector<double> d2;
    std::vector<double> d3;
    for (double v : jackknife) {
        const double d = mean - v;
        d2.push_back(d * d);
        d3.push_back(d * d * d);
    }
    const double s2 = stable_sum(d2);
    if (!(s2 > 0.0)) return 0.0;
    return stable_sum(d3) / (6.0 * std::pow(s2, 1.5));
}

std::pair<double, double> bca_interval(std::span<const double> replicates, double point,
                                       std::span<const double> jackknife, double confidence) {
    std::vector<double> s(replicates.begin(), replicates.end());
    std::sort(s.begin(), s.end());
    if (s.empty()) throw InputError("bca_interval: no replicates");
    if (s.front() == s.back()) return {s.front(), s.front()};

    const boost::math::normal_distribution<double> nd;
    const double n = static_cast<double>(s.size());
    const double below = static_cast<double>(std::lower_bound(s.begin(), s.end(), point) - s.begin());
    const double frac = std::clamp(below / n, 0.5 / n, 1.0 - 0.5 / n);
    const double z0 = boost::math::quantile(nd, frac);
    const double a = bca_acceleration(jackknife);
    const double alpha = 1.0 - confidence;
    auto adjusted = [&](double tail) {
        const double z = boost::math::quantile(nd, tail);
        const double denom = 1.0 - a * (z0 + z);
        if (!(denom > 0.0)) return tail < 0.5 ? 0.0 : 1.0;
        return boost::math::cdf(nd, z0 + (z0 + z) / denom);
    };
    return {quantile_sorted(s, adjusted(alpha / 2.0)), quantile_sorted(s, adjusted(1.0 - alpha / 2.0))};
}

namespace {

constexpr std::uint64_t kJackknifeTag = 0x1ACC;

using DesignMaker = std::function<HorizonDesign(const std::vector<std::size_t>& rows)>;

ConfidenceInterval run_bootstrap(std::size_t horizon, std::size_t T, double point, const DesignMaker& make,
                                 const HorizonEstimator& estimator, const BootstrapConfig& config) {
    config.validate();
    const std::size_t l = config.block_length ? *config.block_length : auto_block_length(T);
    if (l > T) {
        throw ConfigError("inference.block_length: " + std::to_string(l) + " exceeds the " + std::to_string(T) +
                          " available rows at horizon " + std::to_string(horizon));
    }
    const std::uint64_t resample_seed = derive_seed(config.seed, {static_cast<std::uint64_t>(horizon)});

    std::vector<double> betas(config.B, 0.0);
    std::vector<char> ok(config.B, 0);
    parallel_for(config.B, [&](std::size_t b) {
        try {
            const HorizonDesign d = make(block_resample(T, l, resample_seed, b));
            betas[b] = estimator(d, derive_seed(config.seed, {stream::bootstrap, static_cast<std::uint64_t>(b)}))
                           .estimate.beta;
            ok[b] = std::isfinite(betas[b]) ? 1 : 0;
        } catch (const Error&) {
            ok[b] = 0;
        }
    });

    ConfidenceInterval ci;
    ci.horizon = horizon;
    ci.point = point;
    ci.method = config.interval;
    ci.B = config.B;
    ci.block_length = l;
    for (std::size_t b = 0; b < config.B; ++b) {
        if (ok[b]) ci.replicate_betas.push_back(betas[b]);
    }
    ci.n_failed = config.B - ci.replicate_betas.size();
    if (2 * ci.replicate_betas.size() < config.B) {
        throw InferenceError("horizon " + std::to_string(horizon) + ": " + std::to_string(ci.n_failed) + " of " +
                             std::to_string(config.B) + " bootstrap replicates failed");
    }

    if (config.interval == IntervalMethod::percentile) {
        std::tie(ci.lower, ci.upper) = percentile_interval(ci.replicate_betas, config.confidence);
    } else {
        const std::size_t n_blocks = (T + l - 1) / l;
        std::vector<double> jack(n_blocks, 0.0);
        std::vector<char> jok(n_blocks, 0);
        parallel_for(n_blocks, [&](std::size_t i) {
            std::vector<std::size_t> rows;
            for (std::size_t r = 0; r < T; ++r) {
                if (r / l != i) rows.push_back(r);
            }
            try {
                jack[i] = estimator(make(rows), derive_seed(config.seed, {kJackknifeTag, static_cast<std::uint64_t>(i)}))
                              .estimate.beta;
                jok[i] = std::isfinite(jack[i]) ? 1 : 0;
            } catch (const Error&) {
                jok[i] = 0;
            }
        });
        std::vector<double> usable;
        for (std::size_t i = 0; i < n_blocks; ++i) {
            if (jok[i]) usable.push_back(jack[i]);
        }
        std::tie(ci.lower, ci.upper) = bca_interval(ci.replicate_betas, point, usable, config.confidence);
    }
    ci.width = ci.upper - ci.lower;
    return ci;
}

}  // namespace

ConfidenceInterval bootstrap_design(const HorizonDesign& design, double point,
                                    const HorizonEstimator& replicate_estimator, const BootstrapConfig& config) {
    return run_bootstrap(
        design.horizon, design.rows(), point,
        [&](const std::vector<std::size_t>& rows) { return design.select_rows(rows); }, replicate_estimator, config);
}

ConfidenceInterval bootstrap_panel(const TimeSeriesPanel& panel, const VariableRoles& roles, std::size_t horizon,
                                   double point, const HorizonEstimator& replicate_estimator,
                                   const BootstrapConfig& config) {
    return run_bootstrap(
        horizon, panel.num_periods(), point,
        [&](const std::vector<std::size_t>& rows) {
            return build_horizon_design(panel.select_rows(rows), roles, horizon);
        },
        replicate_estimator, config);
}

ConfidenceInterval bootstrap_horizon(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                     const HorizonDesign& design, double point,
                                     const HorizonEstimator& replicate_estimator, const BootstrapConfig& config) {
    if (config.unit == ResampleUnit::panel_rows) {
        return bootstrap_panel(panel, roles, design.horizon, point, replicate_estimator, config);
    }
    return bootstrap_design(design, point, replicate_estimator, config);
}

BootstrapIrfResult bootstrap_irf(const TimeSeriesPanel& panel, const VariableRoles& roles,
                                 std::span<const std::size_t> horizons, const RslpSettings& settings,
                                 const BootstrapConfig& config, std::uint64_t estimator_seed) {
    settings.validate();
    config.validate();
    BootstrapIrfResult out;
    for (std::size_t h : horizons) {
        try {
            const HorizonDesign design = build_horizon_design(panel, roles, h);
            const RslpHorizonResult point = estimate_rslp_horizon(design, settings, estimator_seed);
            const HorizonEstimator rep = rslp_fixed_k_estimator(settings, point.ensemble.estimate.selected_k);
            out.intervals.push_back(
                bootstrap_horizon(panel, roles, design, point.ensemble.estimate.beta, rep, config));
            out.estimates.push_back(point.ensemble.estimate);
        } catch (const Error& e) {
            rethrow_with_context(e, "horizon " + std::to_string(h));
        }
    }
    return out;
}

}  // namespace erslp
