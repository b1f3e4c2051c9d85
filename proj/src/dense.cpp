#include "podfem/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "podfem/error.hpp"
#include "podfem/kernels.hpp"

namespace podfem {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) throw ParameterError("matvec: dimension mismatch");
    Vector y(a.rows());
    kernels::active().gemv(a.data(), a.rows(), a.cols(), x.data(), y.data());
    return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    return matmul_nt(a, b.transposed());
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw ParameterError("matmul_nt: dimension mismatch");
    Matrix c(a.rows(), b.rows());
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        k.gemv(b.data(), b.rows(), b.cols(), a.row(i).data(), c.row(i).data());
    }
    return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ParameterError("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double frobenius_norm(const Matrix& a) {
    return norm2({a.data(), a.rows() * a.cols()});
}

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

Cholesky::Cholesky(const Matrix& a) : n_(a.rows()), lower_(a.rows(), a.rows()), upper_(a.rows(), a.rows()) {
    if (a.rows() != a.cols()) throw ParameterError("Cholesky: matrix is not square");
    const auto& k = kernels::active();
    for (std::size_t j = 0; j < n_; ++j) {
        const double* lj = lower_.row(j).data();
        const double pivot = a(j, j) - k.dot(lj, lj, j);
        if (!(pivot > 0.0)) {
            throw NumericError("Cholesky: non-positive pivot at row " + std::to_string(j));
        }
        const double d = std::sqrt(pivot);
        lower_(j, j) = d;
        for (std::size_t i = j + 1; i < n_; ++i) {
            const double* li = lower_.row(i).data();
            lower_(i, j) = (a(i, j) - k.dot(li, lj, j)) / d;
        }
    }
    upper_ = lower_.transposed();
}

Vector Cholesky::solve(std::span<const double> b) const {
    Vector x(b.begin(), b.end());
    solve_in_place(x);
    return x;
}

void Cholesky::solve_in_place(std::span<double> x) const {
    if (x.size() != n_) throw ParameterError("Cholesky::solve: dimension mismatch");
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < n_; ++i) {
        x[i] = (x[i] - k.dot(lower_.row(i).data(), x.data(), i)) / lower_(i, i);
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        const double* ui = upper_.row(ii).data();
        x[ii] = (x[ii] - k.dot(ui + ii + 1, x.data() + ii + 1, n_ - ii - 1)) / upper_(ii, ii);
    }
}

}  // namespace podfem
