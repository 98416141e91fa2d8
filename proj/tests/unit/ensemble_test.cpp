#include "erslp/ensemble/aggregate.hpp"
#include "erslp/ensemble/rslp.hpp"
#include "erslp/linalg/solvers.hpp"
#include "erslp/util/error.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace erslp {
namespace {

SubspaceFit make_fit(double beta, double bic = 0.0, double variance = 1.0, std::optional<double> mspe = {}) {
    SubspaceFit f;
    f.beta_h = beta;
    f.bic = bic;
    f.beta_variance = variance;
    f.oos_mspe = mspe;
    f.subspace.indices = {0};
    return f;
}

std::vector<SubspaceFit> random_fits(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> b(0.5, 0.2);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    std::vector<SubspaceFit> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(make_fit(b(rng), 100.0 + 5.0 * u(rng), u(rng), u(rng)));
    return out;
}

TEST(EnsembleWeights, EqualSchemeGivesOnes) {
    const auto fits = random_fits(7, 1);
    for (double w : compute_weights(fits, {WeightKind::equal})) EXPECT_EQ(w, 1.0);
}

TEST(EnsembleWeights, EqualBicGivesEqualWeights) {
    std::vector<SubspaceFit> fits{make_fit(0.2, 50.0), make_fit(0.4, 50.0), make_fit(0.9, 50.0)};
    const auto w = compute_weights(fits, {WeightKind::bic});
    EXPECT_EQ(w[0], w[1]);
    EXPECT_EQ(w[1], w[2]);
    EXPECT_NEAR(aggregate(fits, {WeightKind::bic}, 1).beta, 0.5, 1e-15);
}

TEST(EnsembleWeights, BicWeightsAreMinShiftedExponentials) {
    std::vector<SubspaceFit> fits{make_fit(0.0, 10.0), make_fit(0.0, 11.0), make_fit(0.0, 13.5)};
    const auto w = compute_weights(fits, {WeightKind::bic, 0.7});
    EXPECT_NEAR(w[0], 1.0, 1e-15);
    EXPECT_NEAR(w[1], std::exp(-0.7), 1e-15);
    EXPECT_NEAR(w[2], std::exp(-0.7 * 3.5), 1e-15);
    // Huge BIC values do not overflow or underflow the best fit.
    std::vector<SubspaceFit> big{make_fit(0.0, 1e6), make_fit(0.0, 1e6 + 1e5)};
    const auto wb = compute_weights(big, {WeightKind::bic});
    EXPECT_EQ(wb[0], 1.0);
    EXPECT_GT(wb[1], 0.0);
}

TEST(EnsembleWeights, InverseVarianceHandRatio) {
    std::vector<SubspaceFit> fits{make_fit(0.0, 0.0, 1.0), make_fit(0.0, 0.0, 3.0)};
    const Aggregate a = aggregate_fits(fits, {WeightKind::inverse_variance, 1.0, 1e-15}, 1);
    EXPECT_NEAR(a.weights[0], 0.75, 1e-12);
    EXPECT_NEAR(a.weights[1], 0.25, 1e-12);
}

TEST(EnsembleWeights, InverseMspeUsesHoldoutScores) {
    std::vector<SubspaceFit> fits{make_fit(0.0, 0.0, 1.0, 2.0), make_fit(0.0, 0.0, 1.0, 0.5)};
    const auto w = compute_weights(fits, {WeightKind::inverse_mspe, 1.0, 1e-8});
    EXPECT_NEAR(w[0], 1.0 / (2.0 + 1e-8), 1e-15);
    EXPECT_NEAR(w[1], 1.0 / (0.5 + 1e-8), 1e-15);
}

TEST(EnsembleWeights, InverseMspeWithoutHoldoutIsConfigError) {
    std::vector<SubspaceFit> fits{make_fit(0.1)};
    EXPECT_THROW((void)compute_weights(fits, {WeightKind::inverse_mspe}), ConfigError);
    RslpSettings s;
    s.weights.kind = WeightKind::inverse_mspe;
    EXPECT_THROW(s.validate(), ConfigError);
    s.holdout_fraction = 0.2;
    EXPECT_NO_THROW(s.validate());
}

TEST(EnsembleWeights, SchemeValidation) {
    EXPECT_THROW((WeightScheme{WeightKind::bic, 0.0}).validate(), ConfigError);
    EXPECT_THROW((WeightScheme{WeightKind::inverse_variance, 1.0, 0.0}).validate(), ConfigError);
}

TEST(EnsembleWeights, AllSchemesPositive) {
    const auto fits = random_fits(50, 8);
    for (WeightKind k : {WeightKind::equal, WeightKind::bic, WeightKind::inverse_mspe, WeightKind::inverse_variance}) {
        for (double w : compute_weights(fits, {k})) EXPECT_GT(w, 0.0);
        const Aggregate a = aggregate_fits(fits, {k}, 2);
        double total = 0.0;
        for (double w : a.weights) total += w;
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(EnsembleAggregate, SingletonEnsemble) {
    std::vector<SubspaceFit> fits{make_fit(0.37)};
    const IrfEstimate e = aggregate(fits, {WeightKind::bic}, 4);
    EXPECT_EQ(e.beta, 0.37);
    EXPECT_EQ(e.subspace_std, 0.0);
    EXPECT_EQ(e.n_effective, 1u);
    EXPECT_EQ(e.horizon, 4u);
    EXPECT_EQ(e.weights_entropy, 0.0);
}

TEST(EnsembleAggregate, SymmetricMean) {
    std::vector<SubspaceFit> fits{make_fit(0.4), make_fit(0.6)};
    const IrfEstimate e = aggregate(fits, {}, 1);
    EXPECT_NEAR(e.beta, 0.5, 1e-15);
    EXPECT_NEAR(e.subspace_std, std::sqrt(0.02), 1e-15);
    EXPECT_NEAR(e.weights_entropy, std::log(2.0), 1e-15);
}

TEST(EnsembleAggregate, HandWeightedMean) {
    std::vector<SubspaceFit> fits{make_fit(0.4, 0.0, 1.0), make_fit(0.6, 0.0, 3.0)};
    const IrfEstimate e = aggregate(fits, {WeightKind::inverse_variance, 1.0, 1e-300}, 1);
    EXPECT_NEAR(e.beta, 0.45, 1e-12);
}

TEST(EnsembleAggregate, RescalingWeightsLeavesBetaUnchanged) {
    const auto fits = random_fits(40, 3);
    for (double c : {1e-6, 0.5, 3.0, 1e6}) {
        auto scaled = fits;
        for (auto& f : scaled) f.beta_variance *= c;
        const double a = aggregate(fits, {WeightKind::inverse_variance, 1.0, 1e-300}, 1).beta;
        const double b = aggregate(scaled, {WeightKind::inverse_variance, 1.0, 1e-300}, 1).beta;
        EXPECT_LT(std::abs(a - b), 1e-12) << c;
    }
    // A constant BIC shift rescales every bic weight by the same factor.
    auto shifted = fits;
    for (auto& f : shifted) f.bic += 37.25;
    EXPECT_LT(std::abs(aggregate(fits, {WeightKind::bic}, 1).beta - aggregate(shifted, {WeightKind::bic}, 1).beta), 1e-12);
}

TEST(EnsembleAggregate, ConvexCombinationBounds) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto fits = random_fits(25, seed);
        double lo = fits[0].beta_h;
        double hi = lo;
        for (const auto& f : fits) {
            lo = std::min(lo, f.beta_h);
            hi = std::max(hi, f.beta_h);
        }
        for (WeightKind k : {WeightKind::equal, WeightKind::bic, WeightKind::inverse_mspe, WeightKind::inverse_variance}) {
            const IrfEstimate e = aggregate(fits, {k}, 1);
            EXPECT_GE(e.beta, lo);
            EXPECT_LE(e.beta, hi);
            EXPECT_GE(e.subspace_std, 0.0);
        }
    }
}

TEST(EnsembleAggregate, ShuffleInvariance) {
    auto fits = random_fits(101, 17);
    const double ref = aggregate(fits, {WeightKind::bic}, 1).beta;
    std::mt19937_64 rng(4);
    for (int r = 0; r < 20; ++r) {
        std::shuffle(fits.begin(), fits.end(), rng);
        EXPECT_LT(std::abs(aggregate(fits, {WeightKind::bic}, 1).beta - ref), 1e-12);
    }
}

TEST(EnsembleAggregate, DegenerateFitsAreDropped) {
    std::vector<SubspaceFit> fits{make_fit(0.4), make_fit(100.0), make_fit(0.6)};
    fits[1].degenerate = true;
    const Aggregate a = aggregate_fits(fits, {}, 1);
    EXPECT_NEAR(a.estimate.beta, 0.5, 1e-15);
    EXPECT_EQ(a.estimate.n_effective, 2u);
    EXPECT_EQ(a.weights[1], 0.0);
}

TEST(EnsembleAggregate, AllDegenerateNamesTheHorizon) {
    std::vector<SubspaceFit> fits{make_fit(0.4), make_fit(0.6)};
    for (auto& f : fits) f.degenerate = true;
    try {
        (void)aggregate(fits, {}, 7);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("horizon 7"), std::string::npos);
    }
}

TEST(EnsembleAggregate, StableSumIsCompensated) {
    const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
    EXPECT_EQ(stable_sum(v), 2.0);
}

TEST(EnsembleSelectK, SingletonGrid) {
    AdaptiveKConfig c;
    c.k_min = c.k_max = 5;
    c.tau = 1e-9;  // every metric exceeds tau; the grid cannot grow past q
    const SelectKResult r = select_k_with_metric(c, 5, [](std::size_t) { return true; }, [](std::size_t) { return 42.0; });
    EXPECT_EQ(r.k_star, 5u);
    ASSERT_EQ(r.metric_curve.size(), 1u);
}

TEST(EnsembleSelectK, TiesGoToTheSmallerK) {
    AdaptiveKConfig c;
    c.k_min = 3;
    c.k_max = 4;
    const SelectKResult r = select_k_with_metric(c, 10, [](std::size_t) { return true; }, [](std::size_t) { return 0.9; });
    EXPECT_EQ(r.k_star, 3u);
}

TEST(EnsembleSelectK, ExpansionGrowsTheGridUpToQ) {
    AdaptiveKConfig c;
    c.k_min = 2;
    c.k_max = 4;
    c.tau = 0.5;
    // Metric keeps falling so the best value stays above tau until wide grids.
    const SelectKResult r =
        select_k_with_metric(c, 8, [](std::size_t) { return true; }, [](std::size_t k) { return 10.0 / static_cast<double>(k); });
    // 4 -> ceil(4 * 1.5) = 6 -> min(8, 9) = 8
    EXPECT_EQ(r.expansions, 2u);
    EXPECT_EQ(r.metric_curve.back().first, 8u);
    EXPECT_EQ(r.k_star, 8u);
}

TEST(EnsembleSelectK, NoExpansionBelowThreshold) {
    AdaptiveKConfig c;
    c.k_min = 2;
    c.k_max = 4;
    c.tau = 100.0;
    const SelectKResult r =
        select_k_with_metric(c, 8, [](std::size_t) { return true; }, [](std::size_t k) { return 10.0 / static_cast<double>(k); });
    EXPECT_EQ(r.expansions, 0u);
    EXPECT_EQ(r.k_star, 4u);
}

TEST(EnsembleSelectK, InfeasibleGridIsConfigError) {
    AdaptiveKConfig c;
    c.k_min = 6;
    c.k_max = 8;
    EXPECT_THROW((void)select_k_with_metric(c, 5, [](std::size_t) { return true; }, [](std::size_t) { return 1.0; }),
                 ConfigError);
    c.k_min = 1;
    c.k_max = 3;
    EXPECT_THROW((void)select_k_with_metric(c, 5, [](std::size_t) { return false; }, [](std::size_t) { return 1.0; }),
                 ConfigError);
}

TEST(EnsembleSelectK, ArgminAndDeterminismOnData) {
    const SyntheticData d = test::small_synthetic(21, 150, 12);
    const HorizonDesign hd = build_horizon_design(d.panel, d.roles, 1);
    AdaptiveKConfig c;
    c.k_min = 1;
    c.k_max = 8;
    RslpSettings s;
    s.n_subspaces = 20;
    const SelectKResult a = select_k(hd, c, s, 5);
    const SelectKResult b = select_k(hd, c, s, 5);
    ASSERT_EQ(a.metric_curve, b.metric_curve);
    double best = a.metric_curve.front().second;
    for (const auto& [k, m] : a.metric_curve) best = std::min(best, m);
    for (const auto& [k, m] : a.metric_curve) {
        if (k == a.k_star) EXPECT_EQ(m, best);
        if (k < a.k_star) EXPECT_GT(m, best);
    }
}

TEST(EnsembleSelectK, CvMspeHandOracle) {
    // One subspace containing every control: the ensemble is plain OLS, so blocked CV
    // can be recomputed directly.
    const SyntheticData d = test::small_synthetic(22, 60, 3);
    const HorizonDesign hd = build_horizon_design(d.panel, d.roles, 1);
    RslpSettings s;
    s.n_subspaces = 1;
    const double cv = cv_mspe(hd, 3, s, 4, 9);
    const Matrix x = Matrix::hcat(hd.shared, hd.controls);
    const std::size_t n = hd.rows();
    double sse = 0.0;
    for (std::size_t f = 0; f < 4; ++f) {
        const std::size_t lo = f * n / 4;
        const std::size_t hi = (f + 1) * n / 4;
        std::vector<std::size_t> train;
        for (std::size_t i = 0; i < n; ++i) {
            if (i < lo || i >= hi) train.push_back(i);
        }
        std::vector<double> y;
        for (std::size_t i : train) y.push_back(hd.response[i]);
        const RegressionFit fit = ols_fit(x.select_rows(train), y);
        for (std::size_t i = lo; i < hi; ++i) {
            double pred = 0.0;
            for (std::size_t j = 0; j < x.cols(); ++j) pred += x(i, j) * fit.coefficients[j];
            sse += (hd.response[i] - pred) * (hd.response[i] - pred);
        }
    }
    EXPECT_NEAR(cv, sse / static_cast<double>(n), 1e-10);
}

TEST(EnsembleRslp, SingleFullSubspaceCollapsesToOls) {
    const SyntheticData d = test::small_synthetic(30, 120, 10);
    RslpSettings s;
    s.n_subspaces = 1;
    s.k = 10;
    const std::vector<std::size_t> horizons{1, 2};
    const auto est = estimate_rslp(d.panel, d.roles, horizons, s, 3);
    for (std::size_t i = 0; i < 2; ++i) {
        const HorizonDesign hd = build_horizon_design(d.panel, d.roles, horizons[i]);
        const RegressionFit o = ols_fit(Matrix::hcat(hd.shared, hd.controls), hd.response);
        EXPECT_NEAR(est[i].beta, o.coefficients[kShockColumn], 1e-10);
        EXPECT_EQ(est[i].selected_k, 10u);
    }
}

TEST(EnsembleRslp, DefaultDgpHorizonOneNearTruth) {
    const SyntheticData d = generate_synthetic(SyntheticSpec{});
    const std::vector<std::size_t> horizons{1};
    const auto est = estimate_rslp(d.panel, d.roles, horizons, RslpSettings{}, 1);
    EXPECT_NEAR(est[0].beta, 0.5, 0.1);
    EXPECT_EQ(est[0].n_effective, 100u);
}

TEST(EnsembleRslp, BitIdenticalReruns) {
    const SyntheticData d = test::small_synthetic(31, 200, 16);
    RslpSettings s;
    s.weights.kind = WeightKind::bic;
    const std::vector<std::size_t> horizons{1, 3, 6};
    const auto a = estimate_rslp(d.panel, d.roles, horizons, s, 77);
    const auto b = estimate_rslp(d.panel, d.roles, horizons, s, 77);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(a[i].beta, b[i].beta);
        EXPECT_EQ(a[i].subspace_std, b[i].subspace_std);
        EXPECT_EQ(a[i].weights_entropy, b[i].weights_entropy);
    }
}

TEST(EnsembleRslp, EqualWeightsAreTheSimpleAverage) {
    const SyntheticData d = test::small_synthetic(32, 150, 12);
    const HorizonDesign hd = build_horizon_design(d.panel, d.roles, 2);
    RslpSettings s;
    s.n_subspaces = 30;
    s.k = 4;
    const EnsembleFit e = fit_rslp_ensemble(hd, 4, s, 8);
    std::vector<double> betas;
    for (const auto& f : e.fits) betas.push_back(f.beta_h);
    EXPECT_NEAR(e.estimate.beta, stable_sum(betas) / 30.0, 1e-15);
}

TEST(EnsembleRslp, PredictorAveragesSubspacePredictions) {
    const SyntheticData d = test::small_synthetic(33, 150, 12);
    const HorizonDesign hd = build_horizon_design(d.panel, d.roles, 1);
    RslpSettings s;
    s.n_subspaces = 15;
    s.weights.kind = WeightKind::bic;
    const EnsembleFit e = fit_rslp_ensemble(hd, 5, s, 2);
    const auto pred = e.predictor.predict_all(hd);
    for (std::size_t r = 0; r < hd.rows(); r += 17) {
        double acc = 0.0;
        for (std::size_t j = 0; j < e.fits.size(); ++j) {
            const LpProblem p = make_lp_problem(hd, e.fits[j].subspace);
            double pj = 0.0;
            for (std::size_t c = 0; c < p.design.cols(); ++c) pj += p.design(r, c) * e.fits[j].coefficients[c];
            acc += e.weights[j] * pj;
        }
        EXPECT_NEAR(pred[r], acc, 1e-10);
    }
}

TEST(EnsembleRslp, StratifiedSubspacesHonourQuotas) {
    const SyntheticData d = test::small_synthetic(34, 100, 12);
    const HorizonDesign hd = build_horizon_design(d.panel, d.roles, 1);
    RslpSettings s;
    s.n_subspaces = 40;
    s.sampler.kind = SamplerKind::stratified;
    const auto subs = draw_subspaces(hd, 5, s, 3);
    ASSERT_EQ(subs.size(), 40u);
    for (const auto& sub : subs) {
        std::set<std::string> cats;
        for (std::size_t i : sub.indices) cats.insert(hd.control_categories[i]);
        EXPECT_EQ(cats.size(), 4u);
    }
}

TEST(EnsembleRslp, ErrorsCarryHorizonContext) {
    const SyntheticData d = test::small_synthetic(35, 40, 6);
    RslpSettings s;
    s.k = 6;
    const std::vector<std::size_t> horizons{30};
    try {
        (void)estimate_rslp(d.panel, d.roles, horizons, s, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("horizon 30"), std::string::npos);
    }
}

TEST(EnsembleRslp, SelectedKShrinksAtLongerHorizons) {
    // Two relevant controls; averaged over seeds the adaptive size at the long horizon
    // should not exceed the one-step size.
    double k1 = 0.0;
    double k_long = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SyntheticSpec spec;
        spec.seed = seed;
        spec.n_relevant = 2;
        const SyntheticData d = generate_synthetic(spec);
        RslpSettings s;
        s.n_subspaces = 50;
        s.adaptive = AdaptiveKConfig{};
        const HorizonDesign h1 = build_horizon_design(d.panel, d.roles, 1);
        const HorizonDesign h6 = build_horizon_design(d.panel, d.roles, 6);
        k1 += static_cast<double>(select_k(h1, *s.adaptive, s, seed).k_star);
        k_long += static_cast<double>(select_k(h6, *s.adaptive, s, seed).k_star);
    }
    RecordProperty("mean_k_h1", std::to_string(k1 / 10.0));
    RecordProperty("mean_k_h6", std::to_string(k_long / 10.0));
    EXPECT_LE(k_long, k1) << "mean k at h=1 " << k1 / 10.0 << ", at h=6 " << k_long / 10.0;
}

}  // namespace
}  // namespace erslp
