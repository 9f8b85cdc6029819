#include "dcvar/linalg.hpp"

#include <cmath>
#include <string>

#include "dcvar/error.hpp"

namespace dcvar {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (rhs.n_ != n_) throw Error(ErrorKind::DimensionMismatch, "matrix product");
    Matrix out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = 0; k < n_; ++k) {
            const double a = (*this)(i, k);
            for (std::size_t j = 0; j < n_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

std::vector<double> Matrix::operator*(std::span<const double> v) const {
    if (v.size() != n_) throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

Matrix cholesky_lower(const Matrix& a, double pivot_tol) {
    const std::size_t n = a.size();
    Matrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(a(j, j) > 0.0) || !(diag > pivot_tol * a(j, j)))
            throw Error(ErrorKind::NotPositiveDefinite,
                        "pivot " + std::to_string(j) + " = " + std::to_string(diag));
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

std::vector<double> forward_substitute(const Matrix& lower, std::span<const double> b) {
    const std::size_t n = lower.size();
    if (b.size() != n) throw Error(ErrorKind::DimensionMismatch, "forward_substitute");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * x[k];
        x[i] = s / lower(i, i);
    }
    return x;
}

std::vector<double> back_substitute_transposed(const Matrix& lower, std::span<const double> b) {
    const std::size_t n = lower.size();
    if (b.size() != n) throw Error(ErrorKind::DimensionMismatch, "back_substitute_transposed");
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= lower(k, ii) * x[k];
        x[ii] = s / lower(ii, ii);
    }
    return x;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace dcvar
