#include "podfem/rom.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "podfem/error.hpp"
#include "podfem/kernels.hpp"

namespace podfem::rom {

double ReducedSystem::orthonormality_defect() const {
    return max_abs_diff(ad, Matrix::identity(ad.rows()));
}

ReducedSystem build_reduced(const pod::PODBasis& basis, const fem::FullSystem& sys) {
    if (basis.dofs() != sys.dofs()) throw ParameterError("basis dimension does not match the system");
    const std::size_t d = basis.psi.rows();
    const std::size_t m = sys.dofs();
    Matrix mpsi(d, m);
    Matrix apsi(d, m);
    for (std::size_t k = 0; k < d; ++k) {
        sys.apply_mass(basis.psi.row(k), mpsi.row(k));
        sys.apply_stiffness(basis.psi.row(k), apsi.row(k));
    }
    ReducedSystem r;
    r.basis = &basis;
    r.full = &sys;
    r.tau = sys.tau;
    r.md = matmul_nt(basis.psi, mpsi);
    r.ad = matmul_nt(basis.psi, apsi);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            r.md(i, j) = r.md(j, i) = 0.5 * (r.md(i, j) + r.md(j, i));
            r.ad(i, j) = r.ad(j, i) = 0.5 * (r.ad(i, j) + r.ad(j, i));
        }
    return r;
}

Vector project_initial(std::span<const double> u_h0, const pod::PODBasis& basis, const fem::FullSystem& sys) {
    if (u_h0.size() != sys.dofs() || basis.dofs() != sys.dofs()) {
        throw ParameterError("project_initial: dimension mismatch");
    }
    const Vector au = sys.stiffness_times(u_h0);
    return matvec(basis.psi, au);
}

ReducedTrajectory reduced_solve(const ReducedSystem& rsys, std::span<const double> c0, const fem::LoadSequence& loads) {
    const std::size_t d = rsys.d();
    if (c0.size() != d) throw ParameterError("reduced_solve: initial coefficients have wrong length");
    if (loads.empty()) throw ParameterError("reduced_solve: no load vectors");
    const std::size_t n_steps = loads.size() - 1;
    const Matrix& psi = rsys.basis->psi;

    Matrix lhs(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) lhs(i, j) = rsys.md(i, j) + rsys.tau * rsys.ad(i, j);
    std::optional<Cholesky> chol;
    try {
        chol.emplace(lhs);
    } catch (const NumericError& e) {
        throw NumericError(std::string("reduced system is not SPD: ") + e.what());
    }

    const auto& k = kernels::active();
    ReducedTrajectory out;
    out.times.reserve(n_steps + 1);
    out.coeffs.reserve(n_steps + 1);
    out.times.push_back(0.0);
    out.coeffs.emplace_back(c0.begin(), c0.end());
    Vector projected(d), rhs(d);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        if (loads[n].size() != psi.cols()) throw ParameterError("reduced_solve: load vector has wrong length");
        k.gemv(psi.data(), d, psi.cols(), loads[n].data(), projected.data());
        k.gemv(rsys.md.data(), d, d, out.coeffs.back().data(), rhs.data());
        k.axpy(rsys.tau, projected.data(), rhs.data(), d);
        chol->solve_in_place(rhs);
        out.times.push_back(static_cast<double>(n) * rsys.tau);
        out.coeffs.push_back(rhs);
    }
    return out;
}

Vector lift(std::span<const double> c, const pod::PODBasis& basis) {
    if (c.size() > basis.psi.rows()) throw ParameterError("lift: more coefficients than basis vectors");
    Vector u(basis.dofs(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) kernels::axpy(c[k], basis.psi.row(k), u);
    return u;
}

DiscrepancyReport discrepancy_report(const fem::Trajectory& full, const ReducedTrajectory& red,
                                     const pod::PODBasis& basis, const fem::FullSystem& sys) {
    if (full.states.size() != red.coeffs.size()) throw ParameterError("discrepancy_report: step counts differ");
    DiscrepancyReport report;
    const std::size_t d = red.coeffs.empty() ? 0 : red.coeffs.front().size();
    const double pod_term =
        static_cast<double>(basis.snapshot_count) * std::sqrt(basis.tail_sum(d));
    for (std::size_t n = 0; n < full.states.size(); ++n) {
        Vector diff = lift(red.coeffs[n], basis);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = full.states[n][i] - diff[i];
        DiscrepancyRow row;
        row.n = n;
        row.t = full.times[n];
        row.l2 = fem::mass_norm(sys, diff);
        row.pod_term = pod_term;
        row.tau_term = sys.tau;
        report.max_l2 = std::max(report.max_l2, row.l2);
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace podfem::rom
