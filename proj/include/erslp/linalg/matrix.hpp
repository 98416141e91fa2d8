#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace erslp {

/// Dense column-major matrix of doubles. Columns are contiguous so the vector kernels
/// can run straight over them.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    /// Row-major literal, convenient for fixtures.
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[c * rows_ + r]; }

    [[nodiscard]] std::span<double> col(std::size_t c) noexcept {
        return {data_.data() + c * rows_, rows_};
    }
    [[nodiscard]] std::span<const double> col(std::size_t c) const noexcept {
        return {data_.data() + c * rows_, rows_};
    }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] Matrix select_rows(std::span<const std::size_t> rows) const;
    [[nodiscard]] Matrix select_cols(std::span<const std::size_t> cols) const;
    /// Horizontal concatenation; row counts must agree.
    [[nodiscard]] static Matrix hcat(const Matrix& left, const Matrix& right);

    /// this * v
    [[nodiscard]] std::vector<double> multiply(std::span<const double> v) const;
    /// this^T * v
    [[nodiscard]] std::vector<double> multiply_transposed(std::span<const double> v) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Regressor matrix with one label per column. Construction validates shape,
/// finiteness and label uniqueness.
class DesignMatrix {
public:
    DesignMatrix(Matrix values, std::vector<std::string> column_labels);

    [[nodiscard]] const Matrix& values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<std::string>& column_labels() const noexcept { return labels_; }
    [[nodiscard]] std::size_t rows() const noexcept { return values_.rows(); }
    [[nodiscard]] std::size_t cols() const noexcept { return values_.cols(); }

private:
    Matrix values_;
    std::vector<std::string> labels_;
};

}  // namespace erslp
