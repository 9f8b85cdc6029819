#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dcvar {

/// Dense row-major square matrix. Sizes here are the number of assets, so no
/// blocking or SIMD is attempted.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static Matrix identity(std::size_t n);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] Matrix operator*(const Matrix& rhs) const;
    [[nodiscard]] std::vector<double> operator*(std::span<const double> v) const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Max-abs entrywise difference.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Lower-triangular L with L·Lᵀ = a. Throws NotPositiveDefinite when a pivot
/// falls below `pivot_tol` times the corresponding diagonal entry of a.
Matrix cholesky_lower(const Matrix& a, double pivot_tol = 1e-12);

/// Solves L·x = b for lower-triangular L.
std::vector<double> forward_substitute(const Matrix& lower, std::span<const double> b);

/// Solves Lᵀ·x = b for lower-triangular L.
std::vector<double> back_substitute_transposed(const Matrix& lower, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace dcvar
