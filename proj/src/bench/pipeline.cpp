#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <string>

#include "podfem/bench.hpp"
#include "podfem/error.hpp"
#include "podfem/kernels.hpp"

namespace podfem::bench {

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
auto timed(std::vector<std::pair<std::string, double>>& timing, const std::string& phase, F&& f) {
    const auto start = Clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
        f();
        timing.emplace_back(phase, std::chrono::duration<double>(Clock::now() - start).count());
    } else {
        auto result = f();
        timing.emplace_back(phase, std::chrono::duration<double>(Clock::now() - start).count());
        return result;
    }
}

fem::SpaceField exact_at(Example ex, double t) {
    return [ex, t](double x, double y) { return exact_solution(ex, x, y, t); };
}

}  // namespace

Problem setup_problem(const RunConfig& cfg) {
    validate(cfg);
    Problem p;
    p.cfg = cfg;
    p.order = frac::FracOrder::make(cfg.alpha, cfg.beta);
    p.mesh = fem::TensorMesh(cfg.n_cells_x, cfg.n_cells_y);
    p.system = timed(p.timing, "assemble", [&] { return fem::assemble(p.order, p.mesh, cfg.tau(), cfg.n_steps); });
    p.source = manufactured_source(cfg.example, p.order, p.mesh, cfg.refinement);
    p.loads = timed(p.timing, "source_loads",
                    [&] { return fem::load_sequence(p.source->field(), p.mesh, cfg.tau(), cfg.n_steps); });
    p.u0 = fem::interpolate_initial(exact_at(cfg.example, 0.0), p.mesh);
    return p;
}

TrajectoryHeader header_for(const Problem& p) {
    return TrajectoryHeader{p.mesh.nx(), p.mesh.ny(), p.cfg.n_steps, p.cfg.tau(), p.cfg.alpha, p.cfg.beta};
}

PodStage run_pod(const Problem& p, const fem::Trajectory& traj, std::size_t L) {
    PodStage s;
    const std::vector<std::size_t> idx = pod::snapshot_indices(traj.steps(), L);
    const bool all_zero = std::all_of(idx.begin(), idx.end(), [&](std::size_t n) {
        return std::all_of(traj.states[n].begin(), traj.states[n].end(), [](double v) { return v == 0.0; });
    });
    if (all_zero) {
        // Nothing to compress: an empty basis, so every reduced state is zero.
        const std::size_t m = p.system.dofs();
        s.snapshots.columns = Matrix(idx.size(), m);
        s.snapshots.indices = idx;
        s.snapshots.total_steps = traj.steps();
        s.eig.values.assign(idx.size(), 0.0);
        s.eig.vectors = Matrix::identity(idx.size());
        s.basis.psi = Matrix(0, m);
        s.basis.eigenvalues = s.eig.values;
        s.basis.snapshot_count = idx.size();
        return s;
    }
    s.snapshots = pod::snapshots_from_indices(traj, idx);
    const pod::CorrelationMatrix g = pod::correlation_matrix(s.snapshots, p.system);
    s.eig = pod::symmetric_eig(g.g);
    s.basis = pod::pod_basis(s.snapshots, s.eig, s.eig.rank, p.system);
    return s;
}

pod::BasisCount resolve_d(const pod::PODBasis& basis, std::optional<std::size_t> requested, double tau, double h,
                          double gamma) {
    pod::EigenDecomposition eig;
    eig.values = basis.eigenvalues;
    eig.rank = basis.psi.rows();
    pod::BasisCount choice = pod::choose_d(eig, basis.snapshot_count, tau, h, gamma);
    if (eig.rank == 0) {
        choice.d = 0;
        choice.achieved = 0.0;
        choice.criterion_met = true;
    }
    if (requested) {
        if (*requested < 1 || *requested > basis.psi.rows()) {
            throw ConfigError("requested d=" + std::to_string(*requested) + " outside 1.." +
                              std::to_string(basis.psi.rows()));
        }
        choice.d = *requested;
        choice.achieved = static_cast<double>(basis.snapshot_count) * std::sqrt(basis.tail_sum(choice.d));
        choice.criterion_met = choice.achieved <= choice.threshold;
    }
    return choice;
}

pod::PODBasis truncate_basis(const pod::PODBasis& basis, std::size_t d) {
    if (d > basis.psi.rows() || (d == 0 && basis.psi.rows() > 0)) {
        throw ParameterError("truncate_basis: d out of range");
    }
    pod::PODBasis out;
    out.d = d;
    out.snapshot_count = basis.snapshot_count;
    out.eigenvalues = basis.eigenvalues;
    out.psi = Matrix(d, basis.dofs());
    std::copy(basis.psi.data(), basis.psi.data() + d * basis.dofs(), out.psi.data());
    return out;
}

BenchReport run_pipeline(const RunConfig& cfg, bool persist) {
    Problem p = setup_problem(cfg);
    BenchReport report;
    report.timing = p.timing;
    const double T = cfg.T;
    const auto exact_T = exact_at(cfg.example, T);

    const fem::Trajectory traj =
        timed(report.timing, "fem_loop", [&] { return fem::backward_euler_solve(p.system, p.u0, p.loads); });
    report.full_dofs = p.system.dofs();
    report.fe_error = fem::l2_error(traj.states.back(), exact_T, p.mesh);

    const PodStage stage = timed(report.timing, "pod", [&] { return run_pod(p, traj, cfg.L); });
    report.rank = stage.eig.rank;
    report.eigenvalues = stage.eig.values;
    const double h = std::max(p.mesh.grid_x().h(), p.mesh.grid_y().h());
    report.choice = resolve_d(stage.basis, cfg.d, cfg.tau(), h, p.order.gamma());
    report.reduced_dofs = report.choice.d;

    rom::ReducedTrajectory selected;
    for (std::size_t d = std::min<std::size_t>(1, stage.basis.psi.rows()); d <= stage.basis.psi.rows(); ++d) {
        const pod::PODBasis basis = truncate_basis(stage.basis, d);
        const bool chosen = d == report.choice.d;
        const rom::ReducedSystem rsys = chosen ? timed(report.timing, "rom_build",
                                                       [&] { return rom::build_reduced(basis, p.system); })
                                               : rom::build_reduced(basis, p.system);
        const Vector c0 = rom::project_initial(p.u0, basis, p.system);
        const rom::ReducedTrajectory red =
            chosen ? timed(report.timing, "rom_loop", [&] { return rom::reduced_solve(rsys, c0, p.loads); })
                   : rom::reduced_solve(rsys, c0, p.loads);
        const rom::DiscrepancyReport disc = rom::discrepancy_report(traj, red, basis, p.system);
        ErrorRow row;
        row.d = d;
        row.rom_error = fem::l2_error(rom::lift(red.coeffs.back(), basis), exact_T, p.mesh);
        row.fe_error = report.fe_error;
        row.max_discrepancy = disc.max_l2;
        report.errors.push_back(row);
        if (chosen) {
            report.rom_error = row.rom_error;
            report.discrepancy = disc;
            selected = red;
        }
    }
    const auto seconds = [&](const std::string& phase) {
        for (const auto& [name, s] : report.timing)
            if (name == phase) return s;
        return 0.0;
    };
    report.speedup = seconds("rom_loop") > 0.0 ? seconds("fem_loop") / seconds("rom_loop") : 0.0;

    if (persist) {
        const auto& dir = cfg.output_dir;
        std::filesystem::create_directories(dir);
        write_trajectory(dir / "trajectory.bin", traj, header_for(p));
        write_basis(dir / "basis.bin", stage.basis);
        write_reduced(dir / "reduced.bin", selected, cfg.tau());
        write_eigs_csv(dir / "eigs.csv", report.eigenvalues);
        write_errors_csv(dir / "errors.csv", report.errors);
        write_discrepancy_csv(dir / "discrepancy.csv", report.discrepancy);
        {
            std::ofstream by_d(dir / "discrepancy_by_d.csv");
            by_d.precision(17);
            by_d << "d,max_l2_discrepancy\n";
            for (const auto& row : report.errors) by_d << row.d << ',' << row.max_discrepancy << '\n';
        }
        write_timing_csv(dir / "timing.csv", report.timing);
        std::ofstream(dir / "config.txt") << render_config(cfg);
        std::ofstream summary(dir / "summary.csv");
        summary.precision(17);
        summary << "key,value\n"
                << "full_dofs," << report.full_dofs << "\n"
                << "reduced_dofs," << report.reduced_dofs << "\n"
                << "rank," << report.rank << "\n"
                << "d_rule_met," << (report.choice.criterion_met ? 1 : 0) << "\n"
                << "d_rule_threshold," << report.choice.threshold << "\n"
                << "d_rule_achieved," << report.choice.achieved << "\n"
                << "fe_l2_error_T," << report.fe_error << "\n"
                << "rom_l2_error_T," << report.rom_error << "\n"
                << "max_discrepancy," << report.discrepancy.max_l2 << "\n"
                << "kernel_isa," << kernels::isa_name(kernels::active_isa()) << "\n";
    }
    return report;
}

std::vector<ConvergenceRow> convergence_study(Example ex, const std::vector<std::size_t>& n_cells, double tau,
                                              const RunConfig& base) {
    if (n_cells.size() < 3) throw ConfigError("convergence study needs at least 3 mesh levels");
    if (!(tau > 0.0)) throw ConfigError("convergence study needs a positive time step");
    std::vector<ConvergenceRow> rows;
    for (std::size_t n : n_cells) {
        RunConfig cfg = base;
        cfg.example = ex;
        cfg.n_cells_x = n;
        cfg.n_cells_y = n;
        cfg.n_steps = static_cast<std::size_t>(std::llround(cfg.T / tau));
        cfg.L = std::min(cfg.L, cfg.n_steps);
        const Problem p = setup_problem(cfg);
        const fem::Trajectory traj = fem::backward_euler_solve(p.system, p.u0, p.loads);
        ConvergenceRow row;
        row.n_cells = n;
        row.h = 1.0 / static_cast<double>(n);
        row.error = fem::l2_error(traj.states.back(), exact_at(ex, cfg.T), p.mesh);
        if (!rows.empty() && rows.back().error > 0.0 && row.error > 0.0) {
            row.order = std::log(rows.back().error / row.error) / std::log(rows.back().h / row.h);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace podfem::bench
