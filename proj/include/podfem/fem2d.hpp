#pragma once

// Full-order backward-Euler FEM on the unit square with bilinear hats on a
// tensor-product grid. The fractional stiffness separates as
//   A[(p,q),(p',q')] = Sx[p,p'] My[q,q'] + Mx[p,p'] Sy[q,q']
// and the mass as M = Mx ⊗ My. Dofs are interior nodes, x index fastest.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "podfem/dense.hpp"
#include "podfem/frac_calculus.hpp"

namespace podfem::fem {

using SpaceField = std::function<double(double x, double y)>;
using TimeField = std::function<double(double x, double y, double t)>;

class TensorMesh {
  public:
    TensorMesh(std::size_t n_cells_x, std::size_t n_cells_y) : gx_(n_cells_x), gy_(n_cells_y) {}
    TensorMesh(frac::Grid1D gx, frac::Grid1D gy) : gx_(gx), gy_(gy) {}

    const frac::Grid1D& grid_x() const { return gx_; }
    const frac::Grid1D& grid_y() const { return gy_; }
    std::size_t nx() const { return gx_.interior(); }
    std::size_t ny() const { return gy_.interior(); }
    std::size_t dofs() const { return nx() * ny(); }
    // p, q are 0-based interior indices; node coordinates x_{p+1}, y_{q+1}.
    std::size_t index(std::size_t p, std::size_t q) const { return q * nx() + p; }
    double x(std::size_t p) const { return gx_.node(p + 1); }
    double y(std::size_t q) const { return gy_.node(q + 1); }

    friend bool operator==(const TensorMesh&, const TensorMesh&) = default;

  private:
    frac::Grid1D gx_;
    frac::Grid1D gy_;
};

// Dense Cholesky up to this many dofs, conjugate gradients above.
inline constexpr std::size_t kDenseSolveLimit = 4096;

struct FullSystem {
    frac::FracOrder order;
    TensorMesh mesh{2, 2};
    frac::FracStiffness1D sx;
    frac::FracStiffness1D sy;
    frac::Mass1D mx;
    frac::Mass1D my;
    Matrix sx_dense;
    Matrix sy_dense;
    double tau = 0.0;
    std::size_t n_steps = 0;

    std::size_t dofs() const { return mesh.dofs(); }

    // O(m (nx + ny)) Kronecker actions.
    void apply_stiffness(std::span<const double> v, std::span<double> out) const;
    void apply_mass(std::span<const double> v, std::span<double> out) const;
    Vector stiffness_times(std::span<const double> v) const;
    Vector mass_times(std::span<const double> v) const;

    Matrix dense_stiffness() const;
    Matrix dense_mass() const;
};

FullSystem assemble(const frac::FracOrder& order, const TensorMesh& mesh, double tau, std::size_t n_steps,
                    const frac::StiffnessQuadrature& quad = {});

// Solver for (M + τA) x = b: dense Cholesky for small systems, CG on the
// Kronecker action otherwise. Built once per time loop and reused.
class StepSolver {
  public:
    explicit StepSolver(const FullSystem& sys, std::optional<bool> force_dense = std::nullopt);

    bool dense() const { return chol_.has_value(); }
    void solve(std::span<const double> rhs, std::span<double> x) const;
    std::size_t last_iterations() const { return last_iterations_; }

  private:
    const FullSystem* sys_;
    std::optional<Cholesky> chol_;
    mutable std::size_t last_iterations_ = 0;
};

// Load vectors F^0..F^N; F^n = ((f(·,t_n), φ_pq)).
using LoadSequence = std::vector<Vector>;

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::optional<std::filesystem::path> spill_path;

    std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

// (f, φ_pq) with 5-point Gauss per cell per direction.
Vector load_vector(const SpaceField& f, const TensorMesh& mesh);
LoadSequence load_sequence(const TimeField& f, const TensorMesh& mesh, double tau, std::size_t n_steps);

Vector interpolate_initial(const SpaceField& g, const TensorMesh& mesh);

Trajectory backward_euler_solve(const FullSystem& sys, std::span<const double> u0, const LoadSequence& loads);
Trajectory backward_euler_solve(const FullSystem& sys, std::span<const double> u0, const TimeField& f);

// ‖u_h - exact‖_{L²(Ω)} with 6-point Gauss per cell per direction.
double l2_error(std::span<const double> u, const SpaceField& exact, const TensorMesh& mesh);

// sqrt(vᵀ M v)
double mass_norm(const FullSystem& sys, std::span<const double> v);

// Value of the FE function with coefficients u at (x, y).
double evaluate(std::span<const double> u, const TensorMesh& mesh, double x, double y);

}  // namespace podfem::fem
