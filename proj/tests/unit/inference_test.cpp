#include "erslp/benchmarks/estimators.hpp"
#include "erslp/ensemble/rslp.hpp"
#include "erslp/inference/bootstrap.hpp"
#include "erslp/util/error.hpp"
#include "erslp/util/seed.hpp"

#include "helpers.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace erslp {
namespace {

double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double phi_inv(double p) {
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (phi_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double type7(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

HorizonEstimator shock_ols() {
    return [](const HorizonDesign& d, std::uint64_t) { return fit_ols_lp(d, {}); };
}

TEST(InferenceResample, UnitBlocksAreIidUniform) {
    const std::size_t T = 20;
    std::vector<double> counts(T, 0.0);
    const std::size_t draws = 10000;
    for (std::size_t b = 0; b < draws; ++b) {
        for (std::size_t i : block_resample(T, 1, 31, b)) counts[i] += 1.0;
    }
    const double expected = static_cast<double>(draws * T) / static_cast<double>(T);
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(T - 1));
    const double p = boost::math::cdf(boost::math::complement(dist, chi2));
    EXPECT_GT(p, 0.01) << "chi2 = " << chi2;
}

TEST(InferenceResample, FullBlockIsIdentity) {
    for (std::size_t b = 0; b < 20; ++b) {
        const auto idx = block_resample(37, 37, 5, b);
        std::vector<std::size_t> id(37);
        std::iota(id.begin(), id.end(), std::size_t{0});
        EXPECT_EQ(idx, id);
    }
}

TEST(InferenceResample, EnumeratesAllTwoBlockOutcomes) {
    const std::vector<std::vector<std::size_t>> blocks{{0, 1}, {1, 2}, {2, 3}};
    std::set<std::vector<std::size_t>> allowed;
    for (const auto& a : blocks) {
        for (const auto& b : blocks) allowed.insert({a[0], a[1], b[0], b[1]});
    }
    ASSERT_EQ(allowed.size(), 9u);
    std::map<std::vector<std::size_t>, int> seen;
    const int n = 9000;
    for (int r = 0; r < n; ++r) {
        const auto idx = block_resample(4, 2, 12, static_cast<std::size_t>(r));
        ASSERT_TRUE(allowed.count(idx)) << "unexpected resample";
        ++seen[idx];
    }
    EXPECT_EQ(seen.size(), 9u);
    for (const auto& [idx, c] : seen) EXPECT_NEAR(c / static_cast<double>(n), 1.0 / 9.0, 0.025);
}

TEST(InferenceResample, ValidIndicesDeterminismAndTruncation) {
    for (std::size_t T : {8u, 13u, 100u}) {
        for (std::size_t l : {1u, 3u, 7u}) {
            const auto a = block_resample(T, l, 77, 4);
            EXPECT_EQ(a, block_resample(T, l, 77, 4));
            ASSERT_EQ(a.size(), T);
            for (std::size_t i : a) EXPECT_LT(i, T);
            // Block starts every l positions, runs of l consecutive indices inside.
            for (std::size_t i = 0; i < T; ++i) {
                if (i % l != 0) {
                    EXPECT_EQ(a[i], a[i - 1] + 1);
                }
            }
        }
    }
    EXPECT_THROW((void)block_resample(5, 6, 1, 0), InputError);
    EXPECT_THROW((void)block_resample(5, 0, 1, 0), InputError);
}

TEST(InferenceBlockLength, RuleOfThumb) {
    EXPECT_EQ(auto_block_length(8), 4u);
    EXPECT_EQ(auto_block_length(512), 14u);
    for (std::size_t T : {9u, 27u, 100u, 1000u}) {
        EXPECT_EQ(auto_block_length(T), static_cast<std::size_t>(std::ceil(1.75 * std::cbrt(static_cast<double>(T)) - 1e-12)));
    }
    EXPECT_THROW((void)auto_block_length(1), InputError);
    EXPECT_THROW((void)auto_block_length(7), InputError);
}

TEST(InferenceQuantile, LinearInterpolationOracle) {
    std::vector<double> v(100);
    for (std::size_t i = 0; i < 100; ++i) v[i] = static_cast<double>(i + 1) / 100.0;
    const auto [lo, hi] = percentile_interval(v, 0.95);
    EXPECT_NEAR(lo, 0.03475, 1e-12);
    EXPECT_NEAR(hi, 0.97525, 1e-12);
    EXPECT_NEAR(lo, type7(v, 0.025), 1e-15);
    EXPECT_NEAR(hi, type7(v, 0.975), 1e-15);
    EXPECT_EQ(quantile(v, 0.0), 0.01);
    EXPECT_EQ(quantile(v, 1.0), 1.0);
    const auto r = test::random_vector(57, 3);
    for (double p : {0.01, 0.1, 0.333, 0.5, 0.9}) EXPECT_NEAR(quantile(r, p), type7(r, p), 1e-15);
}

TEST(InferenceQuantile, ShiftEquivariance) {
    const auto r = test::random_vector(200, 8);
    const auto [lo, hi] = percentile_interval(r, 0.9);
    for (double c : {-3.0, 0.25, 10.0}) {
        std::vector<double> s = r;
        for (double& x : s) x += c;
        const auto [slo, shi] = percentile_interval(s, 0.9);
        EXPECT_NEAR(slo, lo + c, 1e-12);
        EXPECT_NEAR(shi, hi + c, 1e-12);
    }
}

TEST(InferenceQuantile, WidthVanishesAsConfidenceShrinks) {
    const auto r = test::random_vector(301, 9);
    double prev = std::numeric_limits<double>::infinity();
    for (double c : {0.99, 0.9, 0.5, 0.1, 0.01, 1e-6}) {
        const auto [lo, hi] = percentile_interval(r, c);
        EXPECT_LE(lo, hi);
        EXPECT_LE(hi - lo, prev);
        prev = hi - lo;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(InferenceBca, MatchesIndependentFormula) {
    const auto reps = test::random_vector(400, 21, 0.3);
    std::vector<double> jack = test::random_vector(12, 22, 0.05);
    for (double& j : jack) j = j * j * j * 40.0 + 0.5;  // skewed
    const double point = 0.07;
    const auto [lo, hi] = bca_interval(reps, point, jack, 0.95);

    const double n = 400.0;
    const double below = static_cast<double>(std::count_if(reps.begin(), reps.end(), [&](double v) { return v < point; }));
    const double z0 = phi_inv(below / n);
    double mean = 0.0;
    for (double j : jack) mean += j / 12.0;
    double s2 = 0.0;
    double s3 = 0.0;
    for (double j : jack) {
        s2 += (mean - j) * (mean - j);
        s3 += (mean - j) * (mean - j) * (mean - j);
    }
    const double a = s3 / (6.0 * std::pow(s2, 1.5));
    EXPECT_NEAR(bca_acceleration(jack), a, 1e-12);
    auto adj = [&](double tail) {
        const double z = phi_inv(tail);
        return phi_cdf(z0 + (z0 + z) / (1.0 - a * (z0 + z)));
    };
    EXPECT_NEAR(lo, type7(reps, adj(0.025)), 1e-9);
    EXPECT_NEAR(hi, type7(reps, adj(0.975)), 1e-9);
}

TEST(InferenceBca, ReducesToPercentileWithoutBiasOrSkew) {
    // Symmetric replicates around the point with a symmetric jackknife.
    std::vector<double> reps;
    for (int i = -50; i <= 50; ++i) {
        if (i != 0) reps.push_back(0.01 * i);
    }
    const std::vector<double> jack{-1.0, 1.0, -2.0, 2.0};
    const auto [blo, bhi] = bca_interval(reps, 0.0, jack, 0.9);
    const auto [plo, phi] = percentile_interval(reps, 0.9);
    EXPECT_NEAR(blo, plo, 1e-9);
    EXPECT_NEAR(bhi, phi, 1e-9);
}

TEST(InferenceBootstrap, IdenticalReplicatesGiveZeroWidth) {
    SyntheticSpec s;
    s.T = 80;
    s.q = 4;
    s.n_categories = 2;
    s.noise_sd = 1e-12;
    const SyntheticData d = generate_synthetic(s);
    const HorizonDesign hd = build_horizon_design(d.panel, d.roles, 1);
    const double point = fit_ols_lp(hd, {}).estimate.beta;
    for (IntervalMethod m : {IntervalMethod::percentile, IntervalMethod::bca}) {
        BootstrapConfig cfg;
        cfg.B = 50;
        cfg.interval = m;
        const ConfidenceInterval ci = bootstrap_design(hd, point, shock_ols(), cfg);
        EXPECT_NEAR(ci.width, 0.0, 1e-9);
        EXPECT_NEAR(ci.lower, point, 1e-9);
        EXPECT_NEAR(ci.upper, point, 1e-9);
        EXPECT_EQ(ci.replicate_betas.size(), 50u);
    }
}

TEST(InferenceBootstrap, IntervalFieldsAndDeterminism) {
    const SyntheticData d = test::small_synthetic(5, 150, 6);
    const HorizonDesign hd = build_horizon_design(d.panel, d.roles, 2);
    BootstrapConfig cfg;
    cfg.B = 60;
    cfg.seed = 12;
    const double point = fit_ols_lp(hd, {}).estimate.beta;
    const ConfidenceInterval a = bootstrap_design(hd, point, shock_ols(), cfg);
    const ConfidenceInterval b = bootstrap_design(hd, point, shock_ols(), cfg);
    EXPECT_EQ(a.replicate_betas, b.replicate_betas);
    EXPECT_EQ(a.lower, b.lower);
    EXPECT_EQ(a.upper, b.upper);
    EXPECT_LE(a.lower, a.upper);
    EXPECT_DOUBLE_EQ(a.width, a.upper - a.lower);
    EXPECT_EQ(a.block_length, auto_block_length(hd.rows()));
    EXPECT_EQ(a.B, 60u);
    EXPECT_EQ(a.horizon, 2u);
    const auto sorted = [&] {
        auto v = a.replicate_betas;
        std::sort(v.begin(), v.end());
        return v;
    }();
    EXPECT_NEAR(a.lower, quantile_sorted(sorted, 0.025), 1e-15);
    BootstrapConfig other = cfg;
    other.seed = 13;
    EXPECT_NE(bootstrap_design(hd, point, shock_ols(), other).replicate_betas, a.replicate_betas);
}

TEST(InferenceBootstrap, PanelRowUnitRebuildsDesign) {
    const SyntheticData d = test::small_synthetic(6, 150, 6);
    const HorizonDesign hd = build_horizon_design(d.panel, d.roles, 1);
    BootstrapConfig cfg;
    cfg.B = 40;
    cfg.unit = ResampleUnit::panel_rows;
    cfg.block_length = 150;
    const double point = fit_ols_lp(hd, {}).estimate.beta;
    // A single full block reproduces the original sample on every replicate.
    const ConfidenceInterval ci = bootstrap_horizon(d.panel, d.roles, hd, point, shock_ols(), cfg);
    for (double b : ci.replicate_betas) EXPECT_NEAR(b, point, 1e-12);
}

TEST(InferenceBootstrap, FailureRateIsReported) {
    const SyntheticData d = test::small_synthetic(7, 100, 4);
    const HorizonDesign hd = build_horizon_design(d.panel, d.roles, 1);
    BootstrapConfig cfg;
    cfg.B = 30;
    const HorizonEstimator always_fails = [](const HorizonDesign&, std::uint64_t) -> HorizonFit {
        throw NumericalError("degenerate replicate");
    };
    try {
        (void)bootstrap_design(hd, 0.0, always_fails, cfg);
        FAIL();
    } catch (const InferenceError& e) {
        EXPECT_NE(std::string(e.what()).find("30"), std::string::npos);
    }
    const HorizonEstimator sometimes = [](const HorizonDesign& hdx, std::uint64_t seed) {
        if (seed % 4 == 0) throw NumericalError("degenerate replicate");
        return fit_ols_lp(hdx, {});
    };
    const ConfidenceInterval ci = bootstrap_design(hd, 0.0, sometimes, cfg);
    EXPECT_EQ(ci.replicate_betas.size() + ci.n_failed, 30u);
    EXPECT_LT(ci.n_failed, 15u);
}

TEST(InferenceBootstrap, ConfigValidation) {
    BootstrapConfig c;
    c.B = 1;
    EXPECT_THROW(c.validate(), ConfigError);
    c.B = 10;
    c.confidence = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c.confidence = 0.9;
    c.block_length = 0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(InferenceBootstrap, RslpIntervalsPerHorizon) {
    const SyntheticData d = test::small_synthetic(8, 150, 10);
    RslpSettings s;
    s.n_subspaces = 10;
    s.k = 4;
    BootstrapConfig cfg;
    cfg.B = 20;
    const std::vector<std::size_t> horizons{1, 3};
    const BootstrapIrfResult r = bootstrap_irf(d.panel, d.roles, horizons, s, cfg, 4);
    ASSERT_EQ(r.intervals.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(r.intervals[i].horizon, horizons[i]);
        EXPECT_EQ(r.intervals[i].point, r.estimates[i].beta);
        EXPECT_LE(r.intervals[i].lower, r.intervals[i].upper);
    }
    const BootstrapIrfResult again = bootstrap_irf(d.panel, d.roles, horizons, s, cfg, 4);
    EXPECT_EQ(again.intervals[1].replicate_betas, r.intervals[1].replicate_betas);
}

TEST(InferenceBootstrap, CoverageOnDefaultDgp) {
    // 100 repetitions of the default design, base ensemble, B = 200, 95% percentile.
    int covered = 0;
    const std::vector<std::size_t> horizons{1};
    for (std::uint64_t r = 0; r < 100; ++r) {
        SyntheticSpec spec;
        spec.seed = derive_seed(2024, {r});
        const SyntheticData d = generate_synthetic(spec);
        BootstrapConfig cfg;
        cfg.seed = derive_seed(2024, {r, 1});
        const BootstrapIrfResult res = bootstrap_irf(d.panel, d.roles, horizons, RslpSettings{}, cfg, cfg.seed);
        if (res.intervals[0].covers(d.true_irf[1])) ++covered;
    }
    RecordProperty("covered", covered);
    EXPECT_GE(covered, 90);
}

}  // namespace
}  // namespace erslp
