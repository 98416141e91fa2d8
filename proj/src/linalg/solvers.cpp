#include "erslp/linalg/solvers.hpp"

#include "erslp/simd/kernels.hpp"
#include "erslp/util/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace erslp {
namespace {

void check_shapes(const Matrix& x, std::span<const double> y, const char* who) {
    if (x.rows() == 0 || x.cols() == 0) throw InputError(std::string(who) + ": empty design");
    if (y.size() != x.rows()) {
        throw InputError(std::string(who) + ": response has " + std::to_string(y.size()) +
                         " entries, design has " + std::to_string(x.rows()) + " rows");
    }
}

void check_penalized(const Matrix& x, std::span<const std::size_t> penalized, const char* who) {
    for (std::size_t j : penalized) {
        if (j >= x.cols()) {
            throw InputError(std::string(who) + ": penalized column " + std::to_string(j) + " out of range");
        }
    }
}

struct QrSolution {
    std::vector<double> beta;
    std::size_t rank = 0;
    std::vector<double> inverse_gram_diagonal;
};

// Householder QR with column pivoting (max remaining column norm). Reflectors are
// stored below the diagonal with an implicit unit leading entry.
QrSolution pivoted_qr_solve(Matrix a, std::vector<double> qty) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const std::size_t steps = std::min(m, n);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<double> norms(n);
    std::vector<double> reference(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = reference[j] = simd::sum_squares(a.col(j));

    std::vector<double> diag(steps, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        std::size_t pivot = k;
        for (std::size_t j = k + 1; j < n; ++j) {
            if (norms[j] > norms[pivot]) pivot = j;
        }
        if (pivot != k) {
            auto ck = a.col(k);
            auto cp = a.col(pivot);
            std::swap_ranges(ck.begin(), ck.end(), cp.begin());
            std::swap(perm[k], perm[pivot]);
            std::swap(norms[k], norms[pivot]);
            std::swap(reference[k], reference[pivot]);
        }

        auto x = a.col(k).subspan(k);
        auto tail = x.subspan(1);
        const double x0 = x[0];
        const double normx = std::sqrt(simd::sum_squares(x));
        if (normx == 0.0) {
            diag[k] = 0.0;
            continue;
        }
        const double alpha = x0 >= 0.0 ? -normx : normx;
        const double tau = (alpha - x0) / alpha;
        simd::scale(1.0 / (x0 - alpha), tail);
        x[0] = alpha;
        diag[k] = alpha;

        auto reflect = [&](std::span<double> target) {
            const double w = target[0] + simd::dot(tail, target.subspan(1));
            if (w == 0.0) return;
            target[0] -= tau * w;
            simd::axpy(-tau * w, tail, target.subspan(1));
        };
        for (std::size_t j = k + 1; j < n; ++j) {
            reflect(a.col(j).subspan(k));
            const double r = a(k, j);
            norms[j] -= r * r;
            if (norms[j] <= 1e-6 * reference[j]) {
                norms[j] = k + 1 < m ? simd::sum_squares(a.col(j).subspan(k + 1)) : 0.0;
                reference[j] = norms[j];
            }
        }
        reflect(std::span<double>(qty).subspan(k));
    }

    QrSolution out;
    const double lead = steps > 0 ? std::abs(diag[0]) : 0.0;
    std::size_t rank = 0;
    while (rank < steps && lead > 0.0 && std::abs(diag[rank]) > kRankTolerance * lead) ++rank;
    out.rank = rank;
    if (rank < n) return out;

    // Back substitution R z = Q'y, then undo the permutation.
    std::vector<double> z(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = qty[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * z[j];
        z[ii] = s / a(ii, ii);
    }
    out.beta.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) out.beta[perm[i]] = z[i];

    // diag((X'X)^{-1}) = row norms of R^{-1}, permuted back.
    Matrix rinv(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        rinv(c, c) = 1.0 / a(c, c);
        for (std::size_t ii = c; ii-- > 0;) {
            double s = 0.0;
            for (std::size_t j = ii + 1; j <= c; ++j) s += a(ii, j) * rinv(j, c);
            rinv(ii, c) = -s / a(ii, ii);
        }
    }
    out.inverse_gram_diagonal.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = i; j < n; ++j) s += rinv(i, j) * rinv(i, j);
        out.inverse_gram_diagonal[perm[i]] = s;
    }
    return out;
}

std::vector<double> min_norm_solve(const Matrix& x, std::span<const double> y, std::size_t& rank) {
    const SvdResult svd = thin_svd(x);
    const double smax = svd.singular.empty() ? 0.0 : svd.singular.front();
    std::vector<double> beta(x.cols(), 0.0);
    rank = 0;
    for (std::size_t k = 0; k < svd.singular.size(); ++k) {
        const double s = svd.singular[k];
        if (smax == 0.0 || s <= kRankTolerance * smax) break;
        ++rank;
        const double coef = simd::dot(svd.u.col(k), y) / s;
        simd::axpy(coef, svd.v.col(k), beta);
    }
    return beta;
}

void finish_fit(const Matrix& x, std::span<const double> y, RegressionFit& fit) {
    fit.residuals.assign(y.begin(), y.end());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        if (fit.coefficients[j] != 0.0) simd::axpy(-fit.coefficients[j], x.col(j), fit.residuals);
    }
    fit.rss = simd::sum_squares(fit.residuals);
    fit.bic = bic_value(fit.rss, x.rows(), x.cols());
    fit.sigma2 = x.rows() > fit.rank ? fit.rss / static_cast<double>(x.rows() - fit.rank) : 0.0;
}

// Solves min ||solve_rhs - solve_matrix b|| and reports residual statistics against (x, y),
// which differ from the solve system only for the augmented ridge problem.
RegressionFit least_squares(const Matrix& solve_matrix, std::span<const double> solve_rhs, const Matrix& x,
                            std::span<const double> y) {
    RegressionFit fit;
    QrSolution qr =
        pivoted_qr_solve(solve_matrix, std::vector<double>(solve_rhs.begin(), solve_rhs.end()));
    if (qr.rank == solve_matrix.cols()) {
        fit.coefficients = std::move(qr.beta);
        fit.rank = qr.rank;
        fit.inverse_gram_diagonal = std::move(qr.inverse_gram_diagonal);
    } else {
        fit.coefficients = min_norm_solve(solve_matrix, solve_rhs, fit.rank);
        fit.rank_deficient = true;
    }
    finish_fit(x, y, fit);
    return fit;
}

}  // namespace

double bic_value(double rss, std::size_t rows, std::size_t cols) {
    const double t = static_cast<double>(rows);
    const double per_obs = std::max(rss / t, std::numeric_limits<double>::min());
    return t * std::log(per_obs) + static_cast<double>(cols) * std::log(t);
}

}  // namespace erslp

namespace erslp {

RegressionFit ols_fit(const Matrix& x, std::span<const double> y) {
    check_shapes(x, y, "ols_fit");
    return least_squares(x, y, x, y);
}

RegressionFit ols_fit(const DesignMatrix& x, std::span<const double> y) { return ols_fit(x.values(), y); }

RegressionFit ridge_fit(const Matrix& x, std::span<const double> y, double penalty,
                        std::span<const std::size_t> penalized_columns) {
    check_shapes(x, y, "ridge_fit");
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) {
        throw InputError("ridge_fit: penalty must be a finite nonnegative number");
    }
    check_penalized(x, penalized_columns, "ridge_fit");
    if (penalty == 0.0 || penalized_columns.empty()) return least_squares(x, y, x, y);

    // [X; sqrt(penalty) * D] b ~ [y; 0]
    const std::size_t m = x.rows();
    const std::size_t extra = penalized_columns.size();
    Matrix augmented(m + extra, x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const auto src = x.col(j);
        std::copy(src.begin(), src.end(), augmented.col(j).begin());
    }
    const double root = std::sqrt(penalty);
    for (std::size_t i = 0; i < extra; ++i) augmented(m + i, penalized_columns[i]) = root;
    std::vector<double> rhs(m + extra, 0.0);
    std::copy(y.begin(), y.end(), rhs.begin());
    RegressionFit fit = least_squares(augmented, rhs, x, y);
    return fit;
}

RegressionFit ridge_fit(const DesignMatrix& x, std::span<const double> y, double penalty,
                        std::span<const std::size_t> penalized_columns) {
    return ridge_fit(x.values(), y, penalty, penalized_columns);
}

RegressionFit elastic_net_fit(const Matrix& x, std::span<const double> y, double l1, double l2,
                              std::span<const std::size_t> penalized_columns, ElasticNetOptions options) {
    check_shapes(x, y, "elastic_net_fit");
    if (!(l1 >= 0.0) || !(l2 >= 0.0) || !std::isfinite(l1) || !std::isfinite(l2)) {
        throw InputError("elastic_net_fit: l1 and l2 must be finite and nonnegative");
    }
    if (!(options.tol > 0.0)) throw InputError("elastic_net_fit: tol must be positive");
    check_penalized(x, penalized_columns, "elastic_net_fit");

    const std::size_t n = x.cols();
    const double t = static_cast<double>(x.rows());
    std::vector<char> penalized(n, 0);
    for (std::size_t j : penalized_columns) penalized[j] = 1;
    std::vector<double> scale(n);
    for (std::size_t j = 0; j < n; ++j) scale[j] = simd::sum_squares(x.col(j)) / t;

    RegressionFit fit;
    fit.coefficients.assign(n, 0.0);
    std::vector<double> residual(y.begin(), y.end());
    fit.diagnostics.converged = false;
    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (scale[j] == 0.0) continue;
            double& beta = fit.coefficients[j];
            const double rho = simd::dot(x.col(j), residual) / t + scale[j] * beta;
            const double updated =
                penalized[j] ? soft_threshold(rho, l1) / (scale[j] + 2.0 * l2) : rho / scale[j];
            const double delta = updated - beta;
            if (delta != 0.0) {
                simd::axpy(-delta, x.col(j), residual);
                beta = updated;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        fit.diagnostics.iterations = iter;
        if (max_change < options.tol) {
            fit.diagnostics.converged = true;
            break;
        }
    }
    fit.rank = n;
    finish_fit(x, y, fit);
    return fit;
}

RegressionFit elastic_net_fit(const DesignMatrix& x, std::span<const double> y, double l1, double l2,
                              std::span<const std::size_t> penalized_columns, ElasticNetOptions options) {
    return elastic_net_fit(x.values(), y, l1, l2, penalized_columns, options);
}

SvdResult thin_svd(const Matrix& x) {
    const std::size_t m = x.rows();
    const std::size_t n = x.cols();
    Matrix u = x;
    Matrix v = Matrix::identity(n);
    constexpr double eps = 1e-15;
    constexpr int max_sweeps = 80;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double a = simd::sum_squares(u.col(i));
                const double b = simd::sum_squares(u.col(j));
                if (a == 0.0 || b == 0.0) continue;
                const double g = simd::dot(u.col(i), u.col(j));
                if (std::abs(g) <= eps * std::sqrt(a * b)) continue;
                const double zeta = (b - a) / (2.0 * g);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                simd::rotate(u.col(i), u.col(j), c, s);
                simd::rotate(v.col(i), v.col(j), c, s);
                rotated = true;
            }
        }
        if (!rotated) break;
    }

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(simd::sum_squares(u.col(j)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return norms[l] > norms[r]; });

    const std::size_t r = std::min(m, n);
    SvdResult out{Matrix(m, r), std::vector<double>(r), Matrix(n, r)};
    for (std::size_t k = 0; k < r; ++k) {
        const std::size_t src = order[k];
        out.singular[k] = norms[src];
        auto dst = out.u.col(k);
        std::copy(u.col(src).begin(), u.col(src).end(), dst.begin());
        if (norms[src] > 0.0) simd::scale(1.0 / norms[src], dst);
        std::copy(v.col(src).begin(), v.col(src).end(), out.v.col(k).begin());
    }
    return out;
}

PrincipalComponents principal_components(const Matrix& x, std::size_t n_factors) {
    if (x.rows() == 0 || x.cols() == 0) throw InputError("principal_components: empty data");
    if (n_factors == 0) throw InputError("principal_components: n_factors must be at least 1");
    if (n_factors > std::min(x.rows(), x.cols())) {
        throw InputError("principal_components: n_factors " + std::to_string(n_factors) +
                         " exceeds min(rows, columns)");
    }
    const double t = static_cast<double>(x.rows());
    PrincipalComponents pc;
    Matrix centred = x;
    pc.column_means.resize(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const double mean = simd::sum(x.col(j)) / t;
        pc.column_means[j] = mean;
        for (double& v : centred.col(j)) v -= mean;
    }

    const SvdResult svd = thin_svd(centred);
    const double smax = svd.singular.front();
    std::size_t rank = 0;
    while (rank < svd.singular.size() && smax > 0.0 && svd.singular[rank] > kRankTolerance * smax) ++rank;
    if (n_factors > rank) {
        throw InputError("principal_components: n_factors " + std::to_string(n_factors) +
                         " exceeds data rank " + std::to_string(rank));
    }

    double total = 0.0;
    for (double s : svd.singular) total += s * s;
    const double dof = x.rows() > 1 ? t - 1.0 : 1.0;
    pc.factors = Matrix(x.rows(), n_factors);
    pc.loadings = Matrix(x.cols(), n_factors);
    for (std::size_t k = 0; k < n_factors; ++k) {
        const auto load = svd.v.col(k);
        std::size_t big = 0;
        for (std::size_t i = 1; i < load.size(); ++i) {
            if (std::abs(load[i]) > std::abs(load[big])) big = i;
        }
        const double sign = load[big] < 0.0 ? -1.0 : 1.0;
        const double s = svd.singular[k];
        for (std::size_t i = 0; i < x.cols(); ++i) pc.loadings(i, k) = sign * load[i];
        for (std::size_t i = 0; i < x.rows(); ++i) pc.factors(i, k) = sign * s * svd.u(i, k);
        pc.explained_variance.push_back(s * s / dof);
        pc.explained_variance_ratio.push_back(s * s / total);
    }
    return pc;
}

}  // namespace erslp
