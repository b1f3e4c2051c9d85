#pragma once

// Small dense linear algebra on row-major storage. Sizes here stay at desk
// scale (a few thousand unknowns at most), so nothing is blocked or sparse.

#include <cstddef>
#include <span>
#include <vector>

namespace podfem {

using Vector = std::vector<double>;

class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Matrix transposed() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// y = A x
Vector matvec(const Matrix& a, std::span<const double> x);
// A B
Matrix matmul(const Matrix& a, const Matrix& b);
// A Bᵀ (rows of A against rows of B; the dot kernel does the work)
Matrix matmul_nt(const Matrix& a, const Matrix& b);

double max_abs_diff(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);
double norm2(std::span<const double> x);

// Dense Cholesky A = L Lᵀ. Construction throws NumericError when a pivot is
// not positive. Both L and Lᵀ are kept row-major so the two triangular
// sweeps run over contiguous rows.
class Cholesky {
  public:
    explicit Cholesky(const Matrix& a);

    std::size_t size() const { return n_; }
    Vector solve(std::span<const double> b) const;
    void solve_in_place(std::span<double> x) const;
    const Matrix& lower() const { return lower_; }

  private:
    std::size_t n_ = 0;
    Matrix lower_;
    Matrix upper_;
};

}  // namespace podfem
