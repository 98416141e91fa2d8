#include "erslp/lp/fit.hpp"

#include "erslp/linalg/solvers.hpp"
#include "erslp/simd/kernels.hpp"
#include "erslp/util/error.hpp"

#include <cmath>
#include <numeric>

namespace erslp {

SubspaceFit fit_subspace(const LpProblem& problem, double holdout_fraction) {
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
        throw InputError("fit_subspace: holdout_fraction must lie in [0, 1)");
    }
    SubspaceFit out;
    out.subspace = problem.subspace;

    const std::size_t n = problem.rows();
    const std::size_t cols = problem.design.cols();
    const std::size_t n_hold =
        holdout_fraction > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(holdout_fraction * static_cast<double>(n)))) : 0;
    const std::size_t n_train = n - std::min(n, n_hold);
    if (n_train < cols + 1) {
        out.degenerate = true;
        return out;
    }

    RegressionFit fit;
    if (n_hold == 0) {
        fit = ols_fit(problem.design, problem.response);
    } else {
        std::vector<std::size_t> head(n_train);
        std::iota(head.begin(), head.end(), std::size_t{0});
        fit = ols_fit(problem.design.select_rows(head),
                      std::span<const double>(problem.response).first(n_train));
    }
    out.coefficients = fit.coefficients;
    out.bic = fit.bic;
    out.insample_rss = fit.rss;
    out.beta_h = fit.coefficients[kShockColumn];
    if (fit.rank_deficient) {
        out.degenerate = true;
        return out;
    }
    out.beta_variance = fit.sigma2 * fit.inverse_gram_diagonal[kShockColumn];

    if (n_hold > 0) {
        double sse = 0.0;
        for (std::size_t i = n_train; i < n; ++i) {
            double pred = 0.0;
            for (std::size_t j = 0; j < cols; ++j) pred += problem.design(i, j) * fit.coefficients[j];
            const double e = problem.response[i] - pred;
            sse += e * e;
        }
        out.oos_mspe = sse / static_cast<double>(n_hold);
    }
    return out;
}

double LinearPredictor::predict(const HorizonDesign& design, std::size_t row) const {
    const std::size_t s = design.num_shared();
    if (coefficients.size() != s + design.num_controls()) throw InputError("LinearPredictor: coefficient size mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < s; ++j) acc += coefficients[j] * design.shared(row, j);
    for (std::size_t j = 0; j < design.num_controls(); ++j) {
        const double c = coefficients[s + j];
        if (c != 0.0) acc += c * design.controls(row, j);
    }
    return acc;
}

std::vector<double> LinearPredictor::predict_all(const HorizonDesign& design) const {
    const std::size_t s = design.num_shared();
    if (coefficients.size() != s + design.num_controls()) throw InputError("LinearPredictor: coefficient size mismatch");
    std::vector<double> out(design.rows(), 0.0);
    for (std::size_t j = 0; j < s; ++j) {
        if (coefficients[j] != 0.0) simd::axpy(coefficients[j], design.shared.col(j), out);
    }
    for (std::size_t j = 0; j < design.num_controls(); ++j) {
        if (coefficients[s + j] != 0.0) simd::axpy(coefficients[s + j], design.controls.col(j), out);
    }
    return out;
}

}  // namespace erslp
