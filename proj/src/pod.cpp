#include "podfem/pod.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "podfem/error.hpp"
#include "podfem/kernels.hpp"

namespace podfem::pod {

std::vector<std::size_t> snapshot_indices(std::size_t n_steps, std::size_t L) {
    if (L < 1) throw ParameterError("need at least one snapshot");
    if (n_steps < 1) throw ParameterError("trajectory has no time steps");
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i <= L; ++i) {
        const auto n = static_cast<std::size_t>(
            std::llround(static_cast<double>(i) * static_cast<double>(n_steps) / static_cast<double>(L)));
        const std::size_t clamped = std::clamp<std::size_t>(n, 1, n_steps);
        if (idx.empty() || idx.back() != clamped) idx.push_back(clamped);
    }
    return idx;
}

SnapshotSet select_snapshots(const fem::Trajectory& traj, std::size_t L) {
    return snapshots_from_indices(traj, snapshot_indices(traj.steps(), L));
}

SnapshotSet snapshots_from_indices(const fem::Trajectory& traj, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw ParameterError("need at least one snapshot");
    const std::size_t m = traj.states.front().size();
    SnapshotSet s;
    s.indices = indices;
    s.total_steps = traj.steps();
    s.columns = Matrix(indices.size(), m);
    bool any_nonzero = false;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] > traj.steps()) throw ParameterError("snapshot index beyond trajectory");
        const Vector& u = traj.states[indices[i]];
        std::copy(u.begin(), u.end(), s.columns.row(i).begin());
        any_nonzero = any_nonzero || std::any_of(u.begin(), u.end(), [](double v) { return v != 0.0; });
    }
    if (!any_nonzero) throw ParameterError("all snapshots are zero");
    return s;
}

CorrelationMatrix correlation_matrix(const SnapshotSet& snaps, const fem::FullSystem& sys) {
    if (snaps.dofs() != sys.dofs()) throw ParameterError("snapshot dimension does not match the system");
    const std::size_t L = snaps.count();
    const std::size_t m = snaps.dofs();
    Matrix au(L, m);
    for (std::size_t i = 0; i < L; ++i) sys.apply_stiffness(snaps.columns.row(i), au.row(i));
    Matrix g = matmul_nt(snaps.columns, au);
    CorrelationMatrix out{Matrix(L, L)};
    const double inv_l = 1.0 / static_cast<double>(L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) out.g(i, j) = 0.5 * (g(i, j) + g(j, i)) * inv_l;
    return out;
}

EigenDecomposition symmetric_eig(const Matrix& g) {
    const std::size_t n = g.rows();
    if (n == 0 || g.cols() != n) throw ParameterError("symmetric_eig: matrix must be square and non-empty");
    double scale = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(g.data()[i]));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(g(i, j) - g(j, i)) > 1e-12 * std::max(1.0, scale)) {
                throw ParameterError("symmetric_eig: matrix is not symmetric");
            }

    Matrix a = g;
    Matrix v = Matrix::identity(n);  // columns are eigenvectors
    const double norm = frobenius_norm(g);
    auto off_mass = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    std::size_t sweeps = 0;
    constexpr std::size_t max_sweeps = 100;
    while (off_mass() > 1e-14 * norm && sweeps < max_sweeps) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        ++sweeps;
    }
    if (off_mass() > 1e-14 * norm) throw NumericError("Jacobi eigensolver did not converge");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.sweeps = sweeps;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(k, i) = v(i, order[k]);
    }
    const double lead = out.values[0];
    out.rank = 0;
    if (lead > 0.0) {
        for (double lam : out.values)
            if (lam > kRankTolerance * lead) ++out.rank;
    }
    return out;
}

double tail_sum(const std::vector<double>& values, std::size_t k) {
    double s = 0.0;
    for (std::size_t j = values.size(); j-- > k;) s += std::max(values[j], 0.0);
    return s;
}

double PODBasis::tail_sum(std::size_t k) const { return pod::tail_sum(eigenvalues, k); }

PODBasis pod_basis(const SnapshotSet& snaps, const EigenDecomposition& eig, std::size_t d,
                   const fem::FullSystem& sys) {
    const std::size_t L = snaps.count();
    if (eig.values.size() != L) throw ParameterError("eigen-decomposition does not match the snapshot count");
    if (d < 1 || d > eig.rank) {
        throw ParameterError("basis size d=" + std::to_string(d) + " outside 1.." + std::to_string(eig.rank));
    }
    if (snaps.dofs() != sys.dofs()) throw ParameterError("snapshot dimension does not match the system");
    const std::size_t m = snaps.dofs();
    PODBasis basis;
    basis.d = d;
    basis.snapshot_count = L;
    basis.eigenvalues = eig.values;
    basis.psi = Matrix(d, m);
    Matrix apsi(d, m);
    for (std::size_t k = 0; k < d; ++k) {
        auto row = basis.psi.row(k);
        auto arow = apsi.row(k);
        const double inv = 1.0 / std::sqrt(static_cast<double>(L) * eig.values[k]);
        for (std::size_t i = 0; i < L; ++i) kernels::axpy(inv * eig.vectors(k, i), snaps.columns.row(i), row);

        // U v / sqrt(L λ) loses orthogonality like eps λ_1 / λ_k; two
        // Gram-Schmidt passes in the energy product restore it.
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t j = 0; j < k; ++j) kernels::axpy(-kernels::dot(apsi.row(j), row), basis.psi.row(j), row);
        sys.apply_stiffness(row, arow);
        const double norm = std::sqrt(kernels::dot(row, arow));
        if (!(norm > 0.0)) throw NumericError("POD basis vector has zero energy");

        std::size_t arg = 0;
        for (std::size_t i = 1; i < m; ++i)
            if (std::abs(row[i]) > std::abs(row[arg])) arg = i;
        const double scale = (row[arg] < 0.0 ? -1.0 : 1.0) / norm;
        for (double& x : row) x *= scale;
        for (double& x : arow) x *= scale;
    }
    return basis;
}

double projection_error(const SnapshotSet& snaps, const Matrix& basis_rows, const fem::FullSystem& sys,
                        std::size_t d) {
    if (d > basis_rows.rows()) throw ParameterError("projection_error: d exceeds the basis size");
    if (basis_rows.cols() != snaps.dofs() || snaps.dofs() != sys.dofs()) {
        throw ParameterError("projection_error: dimension mismatch");
    }
    const std::size_t m = snaps.dofs();
    double total = 0.0;
    Vector au(m), residual(m), ar(m);
    for (std::size_t i = 0; i < snaps.count(); ++i) {
        const auto u = snaps.columns.row(i);
        sys.apply_stiffness(u, au);
        residual.assign(u.begin(), u.end());
        for (std::size_t j = 0; j < d; ++j) {
            const double coeff = kernels::dot(basis_rows.row(j), au);
            kernels::axpy(-coeff, basis_rows.row(j), residual);
        }
        sys.apply_stiffness(residual, ar);
        total += kernels::dot(residual, ar);
    }
    return total / static_cast<double>(snaps.count());
}

double reconstruction_error(const SnapshotSet& snaps, const PODBasis& basis, const fem::FullSystem& sys,
                            std::size_t d) {
    return projection_error(snaps, basis.psi, sys, d);
}

BasisCount choose_d(const EigenDecomposition& eig, std::size_t L, double tau, double h, double gamma, int k) {
    BasisCount out;
    out.threshold = std::max(tau, std::pow(h, static_cast<double>(k) + 1.0 - gamma));
    const std::size_t l = std::max<std::size_t>(eig.rank, 1);
    // Keeping all l vectors always leaves a zero tail, so only a genuine
    // truncation d < l counts as meeting the rule; l == 1 has nothing to cut.
    for (std::size_t d = 1; d < l; ++d) {
        const double achieved = static_cast<double>(L) * std::sqrt(tail_sum(eig.values, d));
        if (achieved <= out.threshold) {
            out.d = d;
            out.criterion_met = true;
            out.achieved = achieved;
            return out;
        }
    }
    out.d = l;
    out.achieved = static_cast<double>(L) * std::sqrt(tail_sum(eig.values, l));
    out.criterion_met = l == 1 && out.achieved <= out.threshold;
    return out;
}

}  // namespace podfem::pod
