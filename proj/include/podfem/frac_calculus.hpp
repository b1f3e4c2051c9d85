#pragma once

// Fractional calculus on uniform grids over [0,1]: Riemann-Liouville
// derivatives of piecewise-linear hats, the symmetrized 1-D fractional
// stiffness matrix, the 1-D mass matrix, and a shifted Grünwald-Letnikov
// differentiator for sampled functions.

#include <cstddef>
#include <span>
#include <vector>

#include "podfem/dense.hpp"
#include "podfem/error.hpp"

namespace podfem::frac {

// 1/(2 cos(order π/2)); negative for order in (1,2).
double riesz_constant(double order);

// Orders (alpha, beta) of the Riesz operators in x and y, both in (1,2).
struct FracOrder {
    double alpha = 1.5;
    double beta = 1.5;
    double c_alpha = 0.0;
    double c_beta = 0.0;
    double mu_x = 0.75;
    double mu_y = 0.75;

    static FracOrder make(double alpha, double beta);
    double gamma() const { return alpha > beta ? alpha : beta; }
};

// Uniform grid on [0,1] with n_cells cells; the interior nodes 1..n_cells-1
// carry the hat functions.
class Grid1D {
  public:
    explicit Grid1D(std::size_t n_cells);

    std::size_t n_cells() const { return n_cells_; }
    std::size_t interior() const { return n_cells_ - 1; }
    double h() const { return h_; }
    double node(std::size_t j) const { return static_cast<double>(j) * h_; }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

  private:
    std::size_t n_cells_;
    double h_;
};

// ₀D_x^mu φ_j(x) and ₓD₁^mu φ_j(x) for the hat at interior node j (1-based),
// 0 < mu < 1. Closed form via truncated powers (x - x_k)₊^(1-mu).
double left_rl_deriv_hat(std::size_t j, double mu, const Grid1D& grid, double x);
double right_rl_deriv_hat(std::size_t j, double mu, const Grid1D& grid, double x);

struct StiffnessQuadrature {
    int gauss_points = 20;
    int grading_levels = 16;
    double grading_ratio = 0.15;
    double abs_tol = 1e-10;
    int max_refinements = 3;
};

class QuadratureError : public NumericError {
  public:
    QuadratureError(const std::string& what, long offset) : NumericError(what), offset_(offset) {}
    long offset() const { return offset_; }

  private:
    long offset_;
};

// Symmetric Toeplitz matrix S_ij = s(i - j) with
//   S_ij = C [ (₀D^mu φ_i, ₓD₁^mu φ_j) + (ₓD₁^mu φ_i, ₀D^mu φ_j) ].
struct FracStiffness1D {
    double mu = 0.0;
    double c = 0.0;
    Grid1D grid{2};
    // s(k) for k = -(n-1)..(n-1), stored at index k + n - 1.
    std::vector<double> first_row_and_col;

    std::size_t size() const { return grid.interior(); }
    double offset_value(long k) const;
    // 0-based interior indices.
    double entry(std::size_t i, std::size_t j) const;
    Matrix dense() const;
};

FracStiffness1D frac_stiffness_1d(double mu, double c, const Grid1D& grid,
                                  const StiffnessQuadrature& quad = {});

// One Toeplitz value computed by graded composite Gauss-Legendre. Exposed
// for tests that check the refinement behaviour of a single entry.
double stiffness_offset_value(long offset, double mu, double c, const Grid1D& grid,
                              int gauss_points, int grading_levels, double grading_ratio);

// Tridiagonal (h/6, 2h/3, h/6) mass matrix on the interior hats.
struct Mass1D {
    Grid1D grid{2};

    std::size_t size() const { return grid.interior(); }
    double diag() const { return 2.0 * grid.h() / 3.0; }
    double off() const { return grid.h() / 6.0; }
    double entry(std::size_t i, std::size_t j) const;
    void apply(std::span<const double> x, std::span<double> y) const;
    Matrix dense() const;
};

Mass1D mass_1d(const Grid1D& grid);

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int points);

enum class Side { left, right };

// Shifted (by one) Grünwald-Letnikov approximation of the left or right
// Riemann-Liouville derivative of order 0 < order <= 2 at every sample
// point. Samples past either end are taken as zero. First order in step.
std::vector<double> gl_frac_deriv(std::span<const double> samples, double order, double step, Side side);

// -(left + right) / (2 cos(order π/2)) from gl_frac_deriv.
std::vector<double> riesz_of_samples(std::span<const double> samples, double order, double step);

// Trapezoid-rule L² pairing of two sampled functions.
double trapezoid_inner(std::span<const double> a, std::span<const double> b, double step);

// |(₀D^{2mu} u, v) - (₀D^mu u, ₓD₁^mu v)| with Grünwald-Letnikov derivatives
// and trapezoid pairing. Vanishes as step -> 0 for u, v compactly
// supported in (0,1).
double adjoint_identity_residual(std::span<const double> u, std::span<const double> v, double mu,
                                 double step);

}  // namespace podfem::frac
