#pragma once

#include "erslp/data/panel.hpp"
#include "erslp/data/synthetic.hpp"
#include "erslp/linalg/matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace erslp::test {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, scale);
    Matrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = n(rng);
    }
    return m;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    }
    return e;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Matrix with_intercept(const Matrix& x) {
    Matrix out(x.rows(), x.cols() + 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        out(i, 0) = 1.0;
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j + 1) = x(i, j);
    }
    return out;
}

/// Small synthetic panel used across suites.
inline SyntheticData small_synthetic(std::uint64_t seed, std::size_t T = 100, std::size_t q = 8) {
    SyntheticSpec s;
    s.T = T;
    s.q = q;
    s.seed = seed;
    s.n_categories = std::min<std::size_t>(4, q);
    return generate_synthetic(s);
}

}  // namespace erslp::test
