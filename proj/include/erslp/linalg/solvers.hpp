#pragma once

#include "erslp/linalg/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace erslp {

struct SolverDiagnostics {
    std::size_t iterations = 0;
    bool converged = true;
};

struct RegressionFit {
    std::vector<double> coefficients;
    std::vector<double> residuals;
    double rss = 0.0;
    /// T * ln(rss / T) + p * ln(T)
    double bic = 0.0;
    /// rss / (T - rank); zero when there are no residual degrees of freedom.
    double sigma2 = 0.0;
    std::size_t rank = 0;
    bool rank_deficient = false;
    /// diag((X'X)^{-1}); filled by the least-squares solvers on full-rank designs, empty otherwise.
    std::vector<double> inverse_gram_diagonal;
    SolverDiagnostics diagnostics;
};

/// Relative pivot threshold below which a column counts as linearly dependent.
inline constexpr double kRankTolerance = 1e-10;

[[nodiscard]] double bic_value(double rss, std::size_t rows, std::size_t cols);

/// Least squares via Householder QR with column pivoting. Rank-deficient designs fall
/// back to the minimum-norm solution from an SVD and set rank_deficient.
[[nodiscard]] RegressionFit ols_fit(const Matrix& x, std::span<const double> y);
[[nodiscard]] RegressionFit ols_fit(const DesignMatrix& x, std::span<const double> y);

/// Minimizes ||y - Xb||^2 + penalty * sum_{j in penalized} b_j^2, solved as an augmented
/// least-squares problem so that penalty = 0 reduces to ols_fit.
[[nodiscard]] RegressionFit ridge_fit(const Matrix& x, std::span<const double> y, double penalty,
                                      std::span<const std::size_t> penalized_columns);
[[nodiscard]] RegressionFit ridge_fit(const DesignMatrix& x, std::span<const double> y, double penalty,
                                      std::span<const std::size_t> penalized_columns);

struct ElasticNetOptions {
    std::size_t max_iter = 10000;
    double tol = 1e-8;
};

/// Cyclic coordinate descent on ||y - Xb||^2 / (2T) + l1 * sum |b_j| + l2 * sum b_j^2 where
/// both penalties range over penalized_columns only. Non-convergence is reported in
/// diagnostics rather than thrown.
[[nodiscard]] RegressionFit elastic_net_fit(const Matrix& x, std::span<const double> y, double l1,
                                            double l2, std::span<const std::size_t> penalized_columns,
                                            ElasticNetOptions options = {});
[[nodiscard]] RegressionFit elastic_net_fit(const DesignMatrix& x, std::span<const double> y, double l1,
                                            double l2, std::span<const std::size_t> penalized_columns,
                                            ElasticNetOptions options = {});

inline double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

struct SvdResult {
    Matrix u;                     // rows x r, orthonormal columns
    std::vector<double> singular;  // r values, descending
    Matrix v;                     // cols x r, orthonormal columns
};

/// Thin SVD by one-sided (Hestenes) Jacobi rotations. r = min(rows, cols).
[[nodiscard]] SvdResult thin_svd(const Matrix& x);

struct PrincipalComponents {
    Matrix factors;   // T x n_factors component scores
    Matrix loadings;  // columns x n_factors
    std::vector<double> column_means;
    /// Variance of each retained component, nonincreasing.
    std::vector<double> explained_variance;
    /// explained_variance over total variance.
    std::vector<double> explained_variance_ratio;
};

/// PCA of the column-centred data via SVD. Columns are not rescaled; callers that want
/// correlation-matrix PCA standardize first. Each loading vector's largest-magnitude
/// entry is made nonnegative.
[[nodiscard]] PrincipalComponents principal_components(const Matrix& x, std::size_t n_factors);

}  // namespace erslp
