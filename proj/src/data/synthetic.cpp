#include "erslp/data/synthetic.hpp"

#include "erslp/util/error.hpp"
#include "erslp/util/seed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace erslp {

void SyntheticSpec::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("data.synthetic." + field + ": " + why);
    };
    if (T < 10) fail("T", "must be at least 10");
    if (q < 1) fail("q", "must be at least 1");
    if (!(std::abs(rho) < 1.0)) fail("rho", "|rho| must be < 1 for stationarity");
    if (!(std::abs(phi) < 1.0)) fail("phi", "|phi| must be < 1 for stationarity");
    if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) fail("noise_sd", "must be positive");
    if (!(control_correlation >= 0.0 && control_correlation < 1.0)) fail("control_correlation", "must lie in [0, 1)");
    if (n_categories < 1 || n_categories > q) fail("n_categories", "must lie in [1, q]");
    if (n_relevant > q) fail("n_relevant", "cannot exceed q");
    if (!std::isfinite(beta0)) fail("beta0", "must be finite");
    if (!std::isfinite(relevant_coefficient)) fail("relevant_coefficient", "must be finite");
}

std::vector<double> synthetic_true_irf(const SyntheticSpec& spec) {
    std::vector<double> irf(spec.max_horizon + 1, 0.0);
    double x = 1.0;
    double y = 0.0;
    for (std::size_t h = 1; h <= spec.max_horizon; ++h) {
        y = spec.beta0 * x + spec.phi * y;
        x = spec.rho * x;
        irf[h] = y;
    }
    return irf;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t total = spec.T + spec.burn_in;
    std::normal_distribution<double> normal(0.0, 1.0);

    Rng shock_rng = make_rng(spec.seed, {stream::synthetic, 1});
    Rng noise_rng = make_rng(spec.seed, {stream::synthetic, 2});
    Rng control_rng = make_rng(spec.seed, {stream::synthetic, 3});
    Rng essential_rng = make_rng(spec.seed, {stream::synthetic, 4});
    Rng relevant_rng = make_rng(spec.seed, {stream::synthetic, 5});

    std::vector<std::size_t> pool(spec.q);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> relevant;
    for (std::size_t i = 0; i < spec.n_relevant; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, spec.q - 1);
        std::swap(pool[i], pool[pick(relevant_rng)]);
        relevant.push_back(pool[i]);
    }
    std::sort(relevant.begin(), relevant.end());

    const double common = std::sqrt(spec.control_correlation);
    const double idio = std::sqrt(1.0 - spec.control_correlation);
    Matrix g(total, spec.q);
    for (std::size_t t = 0; t < total; ++t) {
        const double f = normal(control_rng);
        for (std::size_t i = 0; i < spec.q; ++i) g(t, i) = common * f + idio * normal(control_rng);
    }

    std::vector<double> x(total, 0.0);
    std::vector<double> y(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        const double u = normal(shock_rng);
        const double e = normal(noise_rng);
        if (t == 0) {
            x[0] = u;
            y[0] = spec.noise_sd * e;
            continue;
        }
        x[t] = spec.rho * x[t - 1] + u;
        double yt = spec.beta0 * x[t - 1] + spec.phi * y[t - 1] + spec.noise_sd * e;
        for (std::size_t i : relevant) yt += spec.relevant_coefficient * g(t - 1, i);
        y[t] = yt;
    }

    const std::size_t extra_essential = spec.p > 0 ? spec.p - 1 : 0;
    Matrix v(total, extra_essential);
    for (std::size_t k = 0; k < extra_essential; ++k) {
        double prev = 0.0;
        for (std::size_t t = 0; t < total; ++t) {
            prev = spec.rho * prev + normal(essential_rng);
            v(t, k) = prev;
        }
    }

    SyntheticData out;
    out.spec = spec;
    TimeSeriesPanel& panel = out.panel;
    panel.names = {"y", "x"};
    out.roles.target = "y";
    out.roles.shock = "x";
    if (spec.p > 0) {
        panel.names.push_back("y_own");
        out.roles.essential.push_back("y_own");
    }
    for (std::size_t k = 0; k < extra_essential; ++k) {
        panel.names.push_back("v" + std::to_string(k + 2));
        out.roles.essential.push_back(panel.names.back());
    }
    for (std::size_t i = 0; i < spec.q; ++i) {
        const std::string name = "g" + std::to_string(i + 1);
        panel.names.push_back(name);
        out.roles.high_dimensional.push_back(name);
        const std::size_t cat = i * spec.n_categories / spec.q;
        panel.categories[name] = "cat" + std::to_string(cat + 1);
    }

    panel.values = Matrix(spec.T, panel.names.size());
    constexpr long kStart = 1960L * 12;
    for (std::size_t t = 0; t < spec.T; ++t) {
        const std::size_t src = t + spec.burn_in;
        std::size_t col = 0;
        panel.values(t, col++) = y[src];
        panel.values(t, col++) = x[src];
        if (spec.p > 0) panel.values(t, col++) = y[src];
        for (std::size_t k = 0; k < extra_essential; ++k) panel.values(t, col++) = v(src, k);
        for (std::size_t i = 0; i < spec.q; ++i) panel.values(t, col++) = g(src, i);
        const long period = kStart + static_cast<long>(t);
        panel.periods.push_back(period);
        panel.dates.push_back(format_period(period));
    }

    for (std::size_t i : relevant) out.relevant_controls.push_back("g" + std::to_string(i + 1));
    out.true_irf = synthetic_true_irf(spec);
    panel.relevant_controls = out.relevant_controls;
    panel.true_irf = out.true_irf;
    return out;
}

}  // namespace erslp
