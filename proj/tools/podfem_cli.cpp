// Command-line driver: full FEM, POD, reduced model, convergence study and
// report rendering for the fractional diffusion benchmarks.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "podfem/bench.hpp"
#include "podfem/error.hpp"
#include "podfem/kernels.hpp"

namespace fs = std::filesystem;
using namespace podfem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonFlags {
    std::string config;
    std::string out;
    std::string d;
    std::optional<std::size_t> L;
    std::string example;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "Config file (key = value lines)");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--d", f.d, "Number of POD basis vectors, or 'auto'");
    cmd->add_option("--L", f.L, "Number of snapshots");
    cmd->add_option("--example", f.example, "Built-in example: 1, 2 or custom");
}

bench::RunConfig resolve_config(const CommonFlags& f) {
    bench::Example ex = bench::Example::one;
    if (!f.config.empty()) ex = bench::load_config(f.config).example;
    if (!f.example.empty()) ex = bench::parse_example(f.example);
    bench::RunConfig cfg = bench::default_config(ex);
    if (!f.config.empty()) cfg = bench::load_config(f.config, cfg);
    cfg.example = ex;
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (f.L) cfg.L = *f.L;
    if (!f.d.empty()) {
        if (f.d == "auto") {
            cfg.d.reset();
        } else {
            std::istringstream in("d = " + f.d);
            cfg.d = bench::parse_config(in, cfg).d;
        }
    }
    bench::validate(cfg);
    return cfg;
}

void check_header(const bench::TrajectoryHeader& h, const bench::Problem& p) {
    const bench::TrajectoryHeader want = bench::header_for(p);
    if (h.nx != want.nx || h.ny != want.ny || h.n_steps != want.n_steps || h.tau != want.tau ||
        h.alpha != want.alpha || h.beta != want.beta) {
        throw ConfigError("persisted trajectory does not match the configuration");
    }
}

int cmd_run(const CommonFlags& f) {
    const bench::RunConfig cfg = resolve_config(f);
    const bench::BenchReport r = bench::run_pipeline(cfg, true);
    std::printf("kernels        : %s\n", std::string(kernels::isa_name(kernels::active_isa())).c_str());
    std::printf("full dofs      : %zu\n", r.full_dofs);
    std::printf("reduced dofs   : %zu (rule %s, threshold %.4g, achieved %.4g)\n", r.reduced_dofs,
                r.choice.criterion_met ? "met" : "unmet", r.choice.threshold, r.choice.achieved);
    std::printf("rank l         : %zu\n", r.rank);
    std::printf("FE  L2 error T : %.6e\n", r.fe_error);
    std::printf("ROM L2 error T : %.6e\n", r.rom_error);
    std::printf("max |u_h-u_d|  : %.6e\n", r.discrepancy.max_l2);
    std::printf("speedup        : %.1fx (time loops only)\n", r.speedup);
    std::printf("artifacts in   : %s\n", cfg.output_dir.string().c_str());
    return 0;
}

int cmd_fem(const CommonFlags& f, bool csv) {
    const bench::RunConfig cfg = resolve_config(f);
    bench::Problem p = bench::setup_problem(cfg);
    const fem::Trajectory traj = fem::backward_euler_solve(p.system, p.u0, p.loads);
    fs::create_directories(cfg.output_dir);
    bench::write_trajectory(cfg.output_dir / "trajectory.bin", traj, bench::header_for(p));
    if (csv) {
        bench::write_trajectory_csv(cfg.output_dir / "trajectory.csv", traj, p.mesh, {0, cfg.n_steps});
    }
    const double err = fem::l2_error(traj.states.back(),
                                     [&](double x, double y) { return bench::exact_solution(cfg.example, x, y, cfg.T); },
                                     p.mesh);
    std::printf("dofs %zu, steps %zu, L2 error at T %.6e\n", p.system.dofs(), cfg.n_steps, err);
    return 0;
}

int cmd_pod(const CommonFlags& f) {
    const bench::RunConfig cfg = resolve_config(f);
    const bench::Problem p = bench::setup_problem(cfg);
    auto [header, traj] = bench::read_trajectory(cfg.output_dir / "trajectory.bin");
    check_header(header, p);
    const bench::PodStage stage = bench::run_pod(p, traj, cfg.L);
    bench::write_basis(cfg.output_dir / "basis.bin", stage.basis);
    bench::write_eigs_csv(cfg.output_dir / "eigs.csv", stage.eig.values);
    std::printf("snapshots %zu, rank %zu, lambda_1 %.6e\n", stage.snapshots.count(), stage.eig.rank,
                stage.eig.values.front());
    return 0;
}

int cmd_rom(const CommonFlags& f) {
    const bench::RunConfig cfg = resolve_config(f);
    const bench::Problem p = bench::setup_problem(cfg);
    auto [header, traj] = bench::read_trajectory(cfg.output_dir / "trajectory.bin");
    check_header(header, p);
    const pod::PODBasis full_basis = bench::read_basis(cfg.output_dir / "basis.bin");
    if (full_basis.dofs() != p.system.dofs()) throw ConfigError("persisted basis does not match the configuration");
    const double h = std::max(p.mesh.grid_x().h(), p.mesh.grid_y().h());
    const pod::BasisCount choice = bench::resolve_d(full_basis, cfg.d, cfg.tau(), h, p.order.gamma());
    const pod::PODBasis basis = bench::truncate_basis(full_basis, choice.d);
    const rom::ReducedSystem rsys = rom::build_reduced(basis, p.system);
    const Vector c0 = rom::project_initial(p.u0, basis, p.system);
    const rom::ReducedTrajectory red = rom::reduced_solve(rsys, c0, p.loads);
    const rom::DiscrepancyReport disc = rom::discrepancy_report(traj, red, basis, p.system);
    bench::write_reduced(cfg.output_dir / "reduced.bin", red, cfg.tau());
    bench::write_discrepancy_csv(cfg.output_dir / "discrepancy.csv", disc);
    auto exact_T = [&](double x, double y) { return bench::exact_solution(cfg.example, x, y, cfg.T); };
    bench::ErrorRow row;
    row.d = choice.d;
    row.rom_error = fem::l2_error(rom::lift(red.coeffs.back(), basis), exact_T, p.mesh);
    row.fe_error = fem::l2_error(traj.states.back(), exact_T, p.mesh);
    bench::write_errors_csv(cfg.output_dir / "errors.csv", {row});
    std::printf("d %zu, ROM L2 error at T %.6e, FE %.6e, max discrepancy %.6e\n", choice.d, row.rom_error,
                row.fe_error, disc.max_l2);
    return 0;
}

int cmd_converge(const CommonFlags& f, const std::vector<std::size_t>& levels, double tau) {
    const bench::RunConfig cfg = resolve_config(f);
    const auto rows = bench::convergence_study(cfg.example, levels, tau, cfg);
    fs::create_directories(cfg.output_dir);
    bench::write_convergence_csv(cfg.output_dir / "convergence.csv", rows);
    std::printf("%8s %12s %14s %8s\n", "cells", "h", "L2 error", "order");
    for (const auto& r : rows) std::printf("%8zu %12.6g %14.6e %8.3f\n", r.n_cells, r.h, r.error, r.order);
    return 0;
}

int cmd_report(const CommonFlags& f) {
    const fs::path dir = f.out.empty() ? fs::path("out") : fs::path(f.out);
    auto [header, traj] = bench::read_trajectory(dir / "trajectory.bin");
    const pod::PODBasis full_basis = bench::read_basis(dir / "basis.bin");
    const rom::ReducedTrajectory red = bench::read_reduced(dir / "reduced.bin");
    const std::size_t d = red.coeffs.empty() ? 0 : red.coeffs.front().size();
    if (d > full_basis.psi.rows() || (d == 0 && full_basis.psi.rows() > 0)) throw ConfigError("reduced trajectory does not match the basis");
    const pod::PODBasis basis = bench::truncate_basis(full_basis, d);
    const fem::TensorMesh mesh(header.nx + 1, header.ny + 1);
    const fem::FullSystem sys =
        fem::assemble(frac::FracOrder::make(header.alpha, header.beta), mesh, header.tau, header.n_steps);
    const rom::DiscrepancyReport disc = rom::discrepancy_report(traj, red, basis, sys);
    bench::write_eigs_csv(dir / "eigs.csv", full_basis.eigenvalues);
    bench::write_discrepancy_csv(dir / "discrepancy.csv", disc);
    std::printf("re-rendered eigs.csv and discrepancy.csv (d = %zu, max discrepancy %.6e)\n", d, disc.max_l2);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced-order FEM for the 2-D Riesz space-fractional diffusion equation"};
    app.require_subcommand(1);

    CommonFlags run_f, fem_f, pod_f, rom_f, conv_f, report_f;
    bool fem_csv = false;
    std::vector<std::size_t> levels{8, 16, 32};
    double conv_tau = 1.0 / 1024.0;

    auto* run = app.add_subcommand("run", "Full pipeline: FEM, POD, ROM, reports");
    add_common(run, run_f);
    auto* fem_cmd = app.add_subcommand("fem", "Full FEM solve; writes trajectory.bin");
    add_common(fem_cmd, fem_f);
    fem_cmd->add_flag("--csv", fem_csv, "Also export the initial and final states as trajectory.csv");
    auto* pod_cmd = app.add_subcommand("pod", "POD basis from a persisted trajectory");
    add_common(pod_cmd, pod_f);
    auto* rom_cmd = app.add_subcommand("rom", "Reduced model from a persisted basis");
    add_common(rom_cmd, rom_f);
    auto* conv = app.add_subcommand("converge", "Mesh convergence study of the full FEM");
    add_common(conv, conv_f);
    conv->add_option("--levels", levels, "Cells per direction for each level")->delimiter(',');
    conv->add_option("--tau", conv_tau, "Fixed time step");
    auto* report = app.add_subcommand("report", "Re-render CSVs from persisted artifacts");
    add_common(report, report_f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_f);
        if (*fem_cmd) return cmd_fem(fem_f, fem_csv);
        if (*pod_cmd) return cmd_pod(pod_f);
        if (*rom_cmd) return cmd_rom(rom_f);
        if (*conv) return cmd_converge(conv_f, levels, conv_tau);
        if (*report) return cmd_report(report_f);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
