#include "erslp/linalg/matrix.hpp"

#include "erslp/simd/kernels.hpp"
#include "erslp/util/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace erslp {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw InputError("Matrix::from_rows: ragged rows");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const {
    Matrix out(rows.size(), cols_);
    for (std::size_t j = 0; j < cols_; ++j) {
        const auto src = col(j);
        auto dst = out.col(j);
        for (std::size_t i = 0; i < rows.size(); ++i) dst[i] = src[rows[i]];
    }
    return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> cols) const {
    Matrix out(rows_, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const auto src = col(cols[j]);
        std::copy(src.begin(), src.end(), out.col(j).begin());
    }
    return out;
}

Matrix Matrix::hcat(const Matrix& left, const Matrix& right) {
    if (left.cols() > 0 && right.cols() > 0 && left.rows() != right.rows()) {
        throw InputError("Matrix::hcat: row counts differ");
    }
    const std::size_t rows = left.cols() > 0 ? left.rows() : right.rows();
    Matrix out(rows, left.cols() + right.cols());
    std::copy(left.data_.begin(), left.data_.end(), out.data_.begin());
    std::copy(right.data_.begin(), right.data_.end(), out.data_.begin() + static_cast<std::ptrdiff_t>(left.data_.size()));
    return out;
}

std::vector<double> Matrix::multiply(std::span<const double> v) const {
    if (v.size() != cols_) throw InputError("Matrix::multiply: dimension mismatch");
    std::vector<double> out(rows_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) {
        if (v[j] != 0.0) simd::axpy(v[j], col(j), out);
    }
    return out;
}

std::vector<double> Matrix::multiply_transposed(std::span<const double> v) const {
    if (v.size() != rows_) throw InputError("Matrix::multiply_transposed: dimension mismatch");
    std::vector<double> out(cols_);
    for (std::size_t j = 0; j < cols_; ++j) out[j] = simd::dot(col(j), v);
    return out;
}

DesignMatrix::DesignMatrix(Matrix values, std::vector<std::string> column_labels)
    : values_(std::move(values)), labels_(std::move(column_labels)) {
    if (values_.rows() == 0 || values_.cols() == 0) throw InputError("DesignMatrix: empty design");
    if (labels_.size() != values_.cols()) {
        throw InputError("DesignMatrix: " + std::to_string(labels_.size()) + " labels for " +
                         std::to_string(values_.cols()) + " columns");
    }
    std::unordered_set<std::string> seen;
    for (const auto& label : labels_) {
        if (!seen.insert(label).second) throw InputError("DesignMatrix: duplicate column label '" + label + "'");
    }
    for (std::size_t j = 0; j < values_.cols(); ++j) {
        for (double v : values_.col(j)) {
            if (!std::isfinite(v)) throw InputError("DesignMatrix: non-finite value in column '" + labels_[j] + "'");
        }
    }
}

}  // namespace erslp
