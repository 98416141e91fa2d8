#include "erslp/ensemble/aggregate.hpp"

#include "erslp/util/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace erslp {

void WeightScheme::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("estimator.weights.lambda: must be positive");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("estimator.weights.epsilon: must be positive");
}

double stable_sum(std::span<const double> values) {
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

std::vector<double> compute_weights(std::span<const SubspaceFit> fits, const WeightScheme& scheme) {
    scheme.validate();
    if (fits.empty()) throw InputError("compute_weights: no fits");
    std::vector<double> w(fits.size(), 1.0);
    switch (scheme.kind) {
        case WeightKind::equal: break;
        case WeightKind::bic: {
            double lo = std::numeric_limits<double>::infinity();
            for (const auto& f : fits) lo = std::min(lo, f.bic);
            for (std::size_t j = 0; j < fits.size(); ++j) {
                w[j] = std::max(std::exp(-scheme.lambda * (fits[j].bic - lo)), std::numeric_limits<double>::min());
            }
            break;
        }
        case WeightKind::inverse_mspe:
            for (std::size_t j = 0; j < fits.size(); ++j) {
                if (!fits[j].oos_mspe) {
                    throw ConfigError("estimator.weights: inverse_mspe weights need estimator.holdout_fraction > 0");
                }
                w[j] = 1.0 / (*fits[j].oos_mspe + scheme.epsilon);
            }
            break;
        case WeightKind::inverse_variance:
            for (std::size_t j = 0; j < fits.size(); ++j) w[j] = 1.0 / (fits[j].beta_variance + scheme.epsilon);
            break;
    }
    return w;
}

Aggregate aggregate_fits(std::span<const SubspaceFit> fits, const WeightScheme& scheme, std::size_t horizon) {
    std::vector<SubspaceFit> usable;
    std::vector<std::size_t> where;
    for (std::size_t j = 0; j < fits.size(); ++j) {
        if (!fits[j].degenerate) {
            usable.push_back(fits[j]);
            where.push_back(j);
        }
    }
    if (usable.empty()) {
        throw NumericalError("horizon " + std::to_string(horizon) + ": all " + std::to_string(fits.size()) +
                             " subspace fits are degenerate");
    }
    const std::vector<double> w = compute_weights(usable, scheme);
    const std::size_t n = usable.size();

    std::vector<double> weighted(n);
    std::vector<double> betas(n);
    for (std::size_t j = 0; j < n; ++j) {
        betas[j] = usable[j].beta_h;
        weighted[j] = w[j] * betas[j];
    }
    const double wsum = stable_sum(w);

    Aggregate out;
    IrfEstimate& est = out.estimate;
    est.horizon = horizon;
    est.beta = stable_sum(weighted) / wsum;
    est.n_effective = n;
    est.selected_k = usable.front().subspace.size();

    if (n > 1) {
        const double mean = stable_sum(betas) / static_cast<double>(n);
        std::vector<double> sq(n);
        for (std::size_t j = 0; j < n; ++j) sq[j] = (betas[j] - mean) * (betas[j] - mean);
        est.subspace_std = std::sqrt(stable_sum(sq) / static_cast<double>(n - 1));
    }

    out.weights.assign(fits.size(), 0.0);
    std::vector<double> ent(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double wn = w[j] / wsum;
        out.weights[where[j]] = wn;
        ent[j] = wn > 0.0 ? -wn * std::log(wn) : 0.0;
    }
    est.weights_entropy = stable_sum(ent);
    return out;
}

IrfEstimate aggregate(std::span<const SubspaceFit> fits, const WeightScheme& scheme, std::size_t horizon) {
    return aggregate_fits(fits, scheme, horizon).estimate;
}

}  // namespace erslp
