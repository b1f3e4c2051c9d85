#include "podfem/fem2d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "podfem/error.hpp"
#include "podfem/kernels.hpp"

namespace podfem::fem {

namespace {

void check_size(std::span<const double> v, std::size_t m, const char* what) {
    if (v.size() != m) {
        throw ParameterError(std::string(what) + ": expected length " + std::to_string(m) + ", got " +
                             std::to_string(v.size()));
    }
}

// Coefficient of the FE function at interior node (p, q), zero on the boundary.
// i, j are global node indices 0..n_cells.
inline double nodal(std::span<const double> u, const TensorMesh& mesh, std::size_t i, std::size_t j) {
    if (i == 0 || j == 0 || i > mesh.nx() || j > mesh.ny()) return 0.0;
    return u[mesh.index(i - 1, j - 1)];
}

}  // namespace

void FullSystem::apply_stiffness(std::span<const double> v, std::span<double> out) const {
    const std::size_t nx = mesh.nx();
    const std::size_t ny = mesh.ny();
    check_size(v, nx * ny, "apply_stiffness");
    check_size(out, nx * ny, "apply_stiffness");
    const auto& k = kernels::active();

    // out = My (V Sx) + Sy (V Mx), V stored as ny rows of length nx.
    Vector vs(nx * ny);
    Vector vm(nx * ny);
    for (std::size_t q = 0; q < ny; ++q) {
        k.gemv(sx_dense.data(), nx, nx, v.data() + q * nx, vs.data() + q * nx);
        mx.apply(v.subspan(q * nx, nx), std::span<double>(vm.data() + q * nx, nx));
    }
    std::fill(out.begin(), out.end(), 0.0);
    const double d = my.diag();
    const double o = my.off();
    for (std::size_t q = 0; q < ny; ++q) {
        double* row = out.data() + q * nx;
        k.axpy(d, vs.data() + q * nx, row, nx);
        if (q > 0) k.axpy(o, vs.data() + (q - 1) * nx, row, nx);
        if (q + 1 < ny) k.axpy(o, vs.data() + (q + 1) * nx, row, nx);
        for (std::size_t qq = 0; qq < ny; ++qq) k.axpy(sy_dense(q, qq), vm.data() + qq * nx, row, nx);
    }
}

void FullSystem::apply_mass(std::span<const double> v, std::span<double> out) const {
    const std::size_t nx = mesh.nx();
    const std::size_t ny = mesh.ny();
    check_size(v, nx * ny, "apply_mass");
    check_size(out, nx * ny, "apply_mass");
    Vector vm(nx * ny);
    for (std::size_t q = 0; q < ny; ++q) {
        mx.apply(v.subspan(q * nx, nx), std::span<double>(vm.data() + q * nx, nx));
    }
    const double d = my.diag();
    const double o = my.off();
    for (std::size_t q = 0; q < ny; ++q) {
        for (std::size_t p = 0; p < nx; ++p) {
            double s = d * vm[q * nx + p];
            if (q > 0) s += o * vm[(q - 1) * nx + p];
            if (q + 1 < ny) s += o * vm[(q + 1) * nx + p];
            out[q * nx + p] = s;
        }
    }
}

Vector FullSystem::stiffness_times(std::span<const double> v) const {
    Vector out(dofs());
    apply_stiffness(v, out);
    return out;
}

Vector FullSystem::mass_times(std::span<const double> v) const {
    Vector out(dofs());
    apply_mass(v, out);
    return out;
}

Matrix FullSystem::dense_stiffness() const {
    const std::size_t nx = mesh.nx();
    const std::size_t ny = mesh.ny();
    Matrix a(nx * ny, nx * ny);
    for (std::size_t q = 0; q < ny; ++q)
        for (std::size_t p = 0; p < nx; ++p)
            for (std::size_t qq = 0; qq < ny; ++qq)
                for (std::size_t pp = 0; pp < nx; ++pp)
                    a(mesh.index(p, q), mesh.index(pp, qq)) =
                        sx_dense(p, pp) * my.entry(q, qq) + mx.entry(p, pp) * sy_dense(q, qq);
    return a;
}

Matrix FullSystem::dense_mass() const {
    const std::size_t nx = mesh.nx();
    const std::size_t ny = mesh.ny();
    Matrix m(nx * ny, nx * ny);
    for (std::size_t q = 0; q < ny; ++q)
        for (std::size_t p = 0; p < nx; ++p)
            for (std::size_t qq = (q > 0 ? q - 1 : 0); qq < std::min(ny, q + 2); ++qq)
                for (std::size_t pp = (p > 0 ? p - 1 : 0); pp < std::min(nx, p + 2); ++pp)
                    m(mesh.index(p, q), mesh.index(pp, qq)) = mx.entry(p, pp) * my.entry(q, qq);
    return m;
}

FullSystem assemble(const frac::FracOrder& order, const TensorMesh& mesh, double tau, std::size_t n_steps,
                    const frac::StiffnessQuadrature& quad) {
    if (!(tau > 0.0)) throw ParameterError("time step must be positive");
    if (n_steps < 1) throw ParameterError("need at least one time step");
    FullSystem sys;
    sys.order = order;
    sys.mesh = mesh;
    sys.tau = tau;
    sys.n_steps = n_steps;
    sys.sx = frac::frac_stiffness_1d(order.mu_x, order.c_alpha, mesh.grid_x(), quad);
    sys.sy = mesh.grid_y() == mesh.grid_x() && order.beta == order.alpha
                 ? sys.sx
                 : frac::frac_stiffness_1d(order.mu_y, order.c_beta, mesh.grid_y(), quad);
    sys.mx = frac::mass_1d(mesh.grid_x());
    sys.my = frac::mass_1d(mesh.grid_y());
    sys.sx_dense = sys.sx.dense();
    sys.sy_dense = sys.sy.dense();
    return sys;
}

StepSolver::StepSolver(const FullSystem& sys, std::optional<bool> force_dense) : sys_(&sys) {
    const bool use_dense = force_dense.value_or(sys.dofs() <= kDenseSolveLimit);
    if (use_dense) {
        Matrix k = sys.dense_stiffness();
        const Matrix m = sys.dense_mass();
        for (std::size_t i = 0; i < k.rows() * k.cols(); ++i) k.data()[i] = m.data()[i] + sys.tau * k.data()[i];
        try {
            chol_.emplace(k);
        } catch (const NumericError& e) {
            throw NumericError(std::string("M + tau*A is not SPD: ") + e.what());
        }
    }
}

void StepSolver::solve(std::span<const double> rhs, std::span<double> x) const {
    if (chol_) {
        std::copy(rhs.begin(), rhs.end(), x.begin());
        chol_->solve_in_place(x);
        last_iterations_ = 0;
        return;
    }
    // CG on (M + τA), warm-started from x.
    const std::size_t m = sys_->dofs();
    const auto& k = kernels::active();
    Vector r(m), p(m), ap(m), tmp(m);
    auto apply = [&](std::span<const double> v, std::span<double> out) {
        sys_->apply_stiffness(v, tmp);
        sys_->apply_mass(v, out);
        k.axpy(sys_->tau, tmp.data(), out.data(), m);
    };
    apply(x, ap);
    for (std::size_t i = 0; i < m; ++i) r[i] = rhs[i] - ap[i];
    p = r;
    double rr = k.dot(r.data(), r.data(), m);
    const double target = 1e-24 * std::max(k.dot(rhs.data(), rhs.data(), m), 1e-300);
    std::size_t it = 0;
    const std::size_t max_it = 10 * m;
    while (rr > target && it < max_it) {
        apply(p, ap);
        const double pap = k.dot(p.data(), ap.data(), m);
        if (!(pap > 0.0)) throw NumericError("CG breakdown: M + tau*A is not SPD");
        const double a = rr / pap;
        k.axpy(a, p.data(), x.data(), m);
        k.axpy(-a, ap.data(), r.data(), m);
        const double rr_new = k.dot(r.data(), r.data(), m);
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
        ++it;
    }
    if (rr > target) throw NumericError("CG did not converge");
    last_iterations_ = it;
}

Vector load_vector(const SpaceField& f, const TensorMesh& mesh) {
    const std::size_t nx = mesh.nx();
    const std::size_t ny = mesh.ny();
    const double hx = mesh.grid_x().h();
    const double hy = mesh.grid_y().h();
    const frac::GaussRule& rule = frac::gauss_legendre(5);
    Vector out(mesh.dofs(), 0.0);
    for (std::size_t cy = 0; cy < mesh.grid_y().n_cells(); ++cy) {
        for (std::size_t cx = 0; cx < mesh.grid_x().n_cells(); ++cx) {
            double local[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
            for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
                const double xi = 0.5 * (1.0 + rule.nodes[a]);
                const double x = (static_cast<double>(cx) + xi) * hx;
                for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
                    const double eta = 0.5 * (1.0 + rule.nodes[b]);
                    const double y = (static_cast<double>(cy) + eta) * hy;
                    const double w = 0.25 * rule.weights[a] * rule.weights[b] * hx * hy * f(x, y);
                    local[0][0] += w * (1.0 - xi) * (1.0 - eta);
                    local[1][0] += w * xi * (1.0 - eta);
                    local[0][1] += w * (1.0 - xi) * eta;
                    local[1][1] += w * xi * eta;
                }
            }
            for (std::size_t a = 0; a < 2; ++a) {
                for (std::size_t b = 0; b < 2; ++b) {
                    const std::size_t i = cx + a;
                    const std::size_t j = cy + b;
                    if (i == 0 || j == 0 || i > nx || j > ny) continue;
                    out[mesh.index(i - 1, j - 1)] += local[a][b];
                }
            }
        }
    }
    return out;
}

LoadSequence load_sequence(const TimeField& f, const TensorMesh& mesh, double tau, std::size_t n_steps) {
    LoadSequence loads;
    loads.reserve(n_steps + 1);
    for (std::size_t n = 0; n <= n_steps; ++n) {
        const double t = static_cast<double>(n) * tau;
        loads.push_back(load_vector([&](double x, double y) { return f(x, y, t); }, mesh));
    }
    return loads;
}

Vector interpolate_initial(const SpaceField& g, const TensorMesh& mesh) {
    Vector u(mesh.dofs());
    for (std::size_t q = 0; q < mesh.ny(); ++q)
        for (std::size_t p = 0; p < mesh.nx(); ++p) u[mesh.index(p, q)] = g(mesh.x(p), mesh.y(q));
    return u;
}

Trajectory backward_euler_solve(const FullSystem& sys, std::span<const double> u0, const LoadSequence& loads) {
    const std::size_t m = sys.dofs();
    check_size(u0, m, "backward_euler_solve initial state");
    if (loads.size() != sys.n_steps + 1) throw ParameterError("backward_euler_solve: need N+1 load vectors");
    const StepSolver solver(sys);
    const auto& k = kernels::active();

    Trajectory traj;
    traj.times.reserve(sys.n_steps + 1);
    traj.states.reserve(sys.n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.emplace_back(u0.begin(), u0.end());
    Vector rhs(m);
    for (std::size_t n = 1; n <= sys.n_steps; ++n) {
        check_size(loads[n], m, "backward_euler_solve load");
        sys.apply_mass(traj.states.back(), rhs);
        k.axpy(sys.tau, loads[n].data(), rhs.data(), m);
        Vector next = traj.states.back();
        solver.solve(rhs, next);
        traj.times.push_back(static_cast<double>(n) * sys.tau);
        traj.states.push_back(std::move(next));
    }
    return traj;
}

Trajectory backward_euler_solve(const FullSystem& sys, std::span<const double> u0, const TimeField& f) {
    return backward_euler_solve(sys, u0, load_sequence(f, sys.mesh, sys.tau, sys.n_steps));
}

double evaluate(std::span<const double> u, const TensorMesh& mesh, double x, double y) {
    const std::size_t ncx = mesh.grid_x().n_cells();
    const std::size_t ncy = mesh.grid_y().n_cells();
    const double sx = std::clamp(x, 0.0, 1.0) * static_cast<double>(ncx);
    const double sy = std::clamp(y, 0.0, 1.0) * static_cast<double>(ncy);
    const std::size_t cx = std::min(static_cast<std::size_t>(sx), ncx - 1);
    const std::size_t cy = std::min(static_cast<std::size_t>(sy), ncy - 1);
    const double xi = sx - static_cast<double>(cx);
    const double eta = sy - static_cast<double>(cy);
    return (1.0 - xi) * (1.0 - eta) * nodal(u, mesh, cx, cy) + xi * (1.0 - eta) * nodal(u, mesh, cx + 1, cy) +
           (1.0 - xi) * eta * nodal(u, mesh, cx, cy + 1) + xi * eta * nodal(u, mesh, cx + 1, cy + 1);
}

double l2_error(std::span<const double> u, const SpaceField& exact, const TensorMesh& mesh) {
    check_size(u, mesh.dofs(), "l2_error");
    const double hx = mesh.grid_x().h();
    const double hy = mesh.grid_y().h();
    const frac::GaussRule& rule = frac::gauss_legendre(6);
    double sum = 0.0;
    for (std::size_t cy = 0; cy < mesh.grid_y().n_cells(); ++cy) {
        for (std::size_t cx = 0; cx < mesh.grid_x().n_cells(); ++cx) {
            const double u00 = nodal(u, mesh, cx, cy);
            const double u10 = nodal(u, mesh, cx + 1, cy);
            const double u01 = nodal(u, mesh, cx, cy + 1);
            const double u11 = nodal(u, mesh, cx + 1, cy + 1);
            double cell = 0.0;
            for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
                const double xi = 0.5 * (1.0 + rule.nodes[a]);
                const double x = (static_cast<double>(cx) + xi) * hx;
                for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
                    const double eta = 0.5 * (1.0 + rule.nodes[b]);
                    const double y = (static_cast<double>(cy) + eta) * hy;
                    const double uh = (1.0 - xi) * (1.0 - eta) * u00 + xi * (1.0 - eta) * u10 +
                                      (1.0 - xi) * eta * u01 + xi * eta * u11;
                    const double e = uh - exact(x, y);
                    cell += rule.weights[a] * rule.weights[b] * e * e;
                }
            }
            sum += 0.25 * hx * hy * cell;
        }
    }
    return std::sqrt(sum);
}

double mass_norm(const FullSystem& sys, std::span<const double> v) {
    const Vector mv = sys.mass_times(v);
    return std::sqrt(std::max(0.0, kernels::dot(v, mv)));
}

}  // namespace podfem::fem
