#pragma once

// Online phase: Galerkin projection of the backward-Euler scheme onto the
// POD subspace, reduced time stepping, lifting, and FE-vs-ROM discrepancy.

#include <cstddef>
#include <span>
#include <vector>

#include "podfem/dense.hpp"
#include "podfem/fem2d.hpp"
#include "podfem/pod.hpp"

namespace podfem::rom {

struct ReducedSystem {
    const pod::PODBasis* basis = nullptr;
    const fem::FullSystem* full = nullptr;
    Matrix md;  // Ψᵀ M Ψ
    Matrix ad;  // Ψᵀ A Ψ, equal to I_d for an energy-orthonormal basis
    double tau = 0.0;

    std::size_t d() const { return md.rows(); }
    // ‖A_d - I_d‖_max
    double orthonormality_defect() const;
};

// Both references must outlive the returned system.
ReducedSystem build_reduced(const pod::PODBasis& basis, const fem::FullSystem& sys);

// c = Ψᵀ A u, the coefficients of the energy projection P^d u.
Vector project_initial(std::span<const double> u_h0, const pod::PODBasis& basis, const fem::FullSystem& sys);

struct ReducedTrajectory {
    std::vector<double> times;
    std::vector<Vector> coeffs;

    std::size_t steps() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

// (M_d + τA_d) c^n = τ Ψᵀ F^n + M_d c^{n-1}; one d x d factorization.
ReducedTrajectory reduced_solve(const ReducedSystem& rsys, std::span<const double> c0, const fem::LoadSequence& loads);

// Ψ c
Vector lift(std::span<const double> c, const pod::PODBasis& basis);

struct DiscrepancyRow {
    std::size_t n = 0;
    double t = 0.0;
    double l2 = 0.0;         // ‖u_h^n - Ψ c^n‖_{L²}
    double pod_term = 0.0;   // L sqrt(Σ_{j>d} λ_j)
    double tau_term = 0.0;   // τ
};

struct DiscrepancyReport {
    std::vector<DiscrepancyRow> rows;
    double max_l2 = 0.0;
};

DiscrepancyReport discrepancy_report(const fem::Trajectory& full, const ReducedTrajectory& red,
                                     const pod::PODBasis& basis, const fem::FullSystem& sys);

}  // namespace podfem::rom
