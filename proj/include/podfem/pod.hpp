#pragma once

// Offline phase of the reduced model: snapshot selection, the correlation
// matrix in the energy inner product (u, v)_w = uᵀ A v, its eigenpairs, and
// the energy-orthonormal POD basis.

#include <cstddef>
#include <vector>

#include "podfem/dense.hpp"
#include "podfem/fem2d.hpp"

namespace podfem::pod {

struct SnapshotSet {
    // L rows of length m; row i is the state at step indices[i].
    Matrix columns;
    std::vector<std::size_t> indices;
    std::size_t total_steps = 0;

    std::size_t count() const { return columns.rows(); }
    std::size_t dofs() const { return columns.cols(); }
};

// n_i = round(i N / L), i = 1..L; u_h^0 is never used and duplicates
// (only possible for L > N) collapse.
std::vector<std::size_t> snapshot_indices(std::size_t n_steps, std::size_t L);

// Throws ParameterError when every selected state is zero.
SnapshotSet select_snapshots(const fem::Trajectory& traj, std::size_t L);
SnapshotSet snapshots_from_indices(const fem::Trajectory& traj, const std::vector<std::size_t>& indices);

struct CorrelationMatrix {
    Matrix g;  // G_ij = (U_i, U_j)_w / L
};

CorrelationMatrix correlation_matrix(const SnapshotSet& snaps, const fem::FullSystem& sys);

inline constexpr double kRankTolerance = 1e-13;

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // row k is the eigenvector for values[k]
    std::size_t rank = 0;        // count of values > kRankTolerance * values[0]
    std::size_t sweeps = 0;
};

// Cyclic Jacobi. Throws ParameterError for asymmetric input.
EigenDecomposition symmetric_eig(const Matrix& g);

struct PODBasis {
    Matrix psi;                        // d rows of length m
    std::vector<double> eigenvalues;   // all L eigenvalues, descending
    std::size_t d = 0;
    std::size_t snapshot_count = 0;

    std::size_t dofs() const { return psi.cols(); }
    // Σ_{j>k} λ_j over all stored eigenvalues (negative round-off clamped).
    double tail_sum(std::size_t k) const;
};

// ψ_k = U v^k / sqrt(L λ_k), re-orthonormalized in the energy product and
// oriented so the largest-magnitude entry is positive. Requires
// 1 <= d <= eig.rank.
PODBasis pod_basis(const SnapshotSet& snaps, const EigenDecomposition& eig, std::size_t d,
                   const fem::FullSystem& sys);

// (1/L) Σ_i ‖U_i - Σ_{j<=d} (U_i, ψ_j)_w ψ_j‖_w², computed directly.
double reconstruction_error(const SnapshotSet& snaps, const PODBasis& basis, const fem::FullSystem& sys,
                            std::size_t d);

// Same quantity for an arbitrary energy-orthonormal set of rows.
double projection_error(const SnapshotSet& snaps, const Matrix& basis_rows, const fem::FullSystem& sys,
                        std::size_t d);

struct BasisCount {
    std::size_t d = 1;
    bool criterion_met = false;
    double threshold = 0.0;  // max{τ, h^{k+1-γ}}
    double achieved = 0.0;   // L sqrt(Σ_{j>d} λ_j)
};

// Smallest d in [1, rank] with L sqrt(Σ_{j>d} λ_j) <= max{τ, h^{k+1-γ}}.
BasisCount choose_d(const EigenDecomposition& eig, std::size_t L, double tau, double h, double gamma, int k = 1);

double tail_sum(const std::vector<double>& values, std::size_t k);

}  // namespace podfem::pod
