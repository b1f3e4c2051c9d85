#pragma once

// Manufactured test problems, run configuration, artifact persistence and
// the end-to-end offline/online pipeline behind the command-line driver.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "podfem/fem2d.hpp"
#include "podfem/frac_calculus.hpp"
#include "podfem/pod.hpp"
#include "podfem/rom.hpp"

namespace podfem::bench {

// zero: u ≡ 0 (degenerate sanity case); one: smooth separable decay;
// two: a Gaussian bump travelling along the diagonal.
enum class Example { zero = 0, one = 1, two = 2 };

Example parse_example(const std::string& text);

// 4 cos(1.5π/2) cos(1.6π/2) e^{-t} sin²(2πx) sin²(2πy)
double exact_solution_1(double x, double y, double t);
// 4e3 cos(1.5π/2) cos(1.6π/2) exp(-((x-t)² + (y-t)²)/0.04) x²(x-1)² y²(1-y)²
double exact_solution_2(double x, double y, double t);

double exact_solution(Example ex, double x, double y, double t);
double exact_time_derivative(Example ex, double x, double y, double t);

// f = u_t - ∂^α u/∂|x|^α - ∂^β u/∂|y|^β for an exact solution of the form
// u = a(t) s_t(x) s_t(y). The Riesz terms of s_t come from Grünwald-Letnikov
// differences on a fine auxiliary grid at two resolutions; the two must agree
// to 1% (discrete L²) and are then Richardson-combined.
class ManufacturedSource {
  public:
    ManufacturedSource(Example ex, const frac::FracOrder& order, std::size_t fine_intervals);

    double operator()(double x, double y, double t) const;
    fem::TimeField field() const;

    std::size_t fine_intervals() const { return fine_intervals_; }
    // Largest relative gap seen in the self-convergence check so far.
    double worst_self_convergence_gap() const;

  private:
    struct Profile {
        double t = 0.0;
        std::vector<double> riesz_x;
        std::vector<double> riesz_y;
    };
    Profile compute(double t) const;
    std::vector<double> riesz_line(double order, double t) const;
    double interp(const std::vector<double>& table, double z) const;

    Example ex_;
    frac::FracOrder order_;
    std::size_t fine_intervals_;
    mutable std::mutex mutex_;
    mutable std::optional<Profile> cache_;
    mutable double worst_gap_ = 0.0;
};

inline constexpr std::size_t kMinRefinement = 8;

// Build the manufactured source with refinement_factor fine intervals per
// coarsest-direction FE cell. Throws ConfigError for refinement < 8.
std::shared_ptr<ManufacturedSource> manufactured_source(Example ex, const frac::FracOrder& order,
                                                        const fem::TensorMesh& mesh,
                                                        std::size_t refinement_factor);

struct RunConfig {
    double alpha = 1.5;
    double beta = 1.6;
    double T = 1.0;
    std::size_t n_cells_x = 16;
    std::size_t n_cells_y = 16;
    std::size_t n_steps = 256;
    std::size_t L = 17;
    std::optional<std::size_t> d;  // nullopt: basis-count rule
    Example example = Example::one;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 12345;
    std::size_t refinement = 32;

    double tau() const { return T / static_cast<double>(n_steps); }
};

// Defaults for the built-in examples (L = 34 for example 2).
RunConfig default_config(Example ex);

// Flat `key = value` lines, `#` comments. Unknown keys and malformed values
// throw ConfigError. Keys absent from the text keep their value in `base`.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
void validate(const RunConfig& cfg);
std::string render_config(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Binary artifacts. All integers/reals are little-endian 64-bit; every file
// starts with an 8-byte NUL-padded magic.

struct TrajectoryHeader {
    std::uint64_t nx = 0;  // interior nodes in x
    std::uint64_t ny = 0;
    std::uint64_t n_steps = 0;
    double tau = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

void write_trajectory(const std::filesystem::path& path, const fem::Trajectory& traj, const TrajectoryHeader& header);
std::pair<TrajectoryHeader, fem::Trajectory> read_trajectory(const std::filesystem::path& path);

void write_basis(const std::filesystem::path& path, const pod::PODBasis& basis);
pod::PODBasis read_basis(const std::filesystem::path& path);

void write_reduced(const std::filesystem::path& path, const rom::ReducedTrajectory& red, double tau);
rom::ReducedTrajectory read_reduced(const std::filesystem::path& path);

// CSV outputs; reals printed with 17 significant digits.
void write_eigs_csv(const std::filesystem::path& path, const std::vector<double>& eigenvalues);
void write_discrepancy_csv(const std::filesystem::path& path, const rom::DiscrepancyReport& report);
void write_timing_csv(const std::filesystem::path& path, const std::vector<std::pair<std::string, double>>& timing);
// One row per dof per selected step: n, t, dof, x, y, value.
void write_trajectory_csv(const std::filesystem::path& path, const fem::Trajectory& traj, const fem::TensorMesh& mesh,
                          const std::vector<std::size_t>& steps);

// ---------------------------------------------------------------------------
// Pipeline

struct Problem {
    RunConfig cfg;
    frac::FracOrder order;
    fem::TensorMesh mesh{2, 2};
    fem::FullSystem system;
    std::shared_ptr<ManufacturedSource> source;
    fem::LoadSequence loads;
    Vector u0;
    std::vector<std::pair<std::string, double>> timing;
};

Problem setup_problem(const RunConfig& cfg);
TrajectoryHeader header_for(const Problem& p);

struct PodStage {
    pod::SnapshotSet snapshots;
    pod::EigenDecomposition eig;
    pod::PODBasis basis;  // all rank-many vectors
};

// An all-zero snapshot set gives rank 0 and an empty basis.
PodStage run_pod(const Problem& p, const fem::Trajectory& traj, std::size_t L);

// Basis count from an explicit request, or the basis-count rule (d = 0 for
// an empty basis).
pod::BasisCount resolve_d(const pod::PODBasis& basis, std::optional<std::size_t> requested, double tau, double h,
                          double gamma);

// Restrict a basis to its first d vectors.
pod::PODBasis truncate_basis(const pod::PODBasis& basis, std::size_t d);

struct ErrorRow {
    std::size_t d = 0;
    double rom_error = 0.0;
    double fe_error = 0.0;
    double max_discrepancy = 0.0;
};

struct BenchReport {
    std::size_t full_dofs = 0;
    std::size_t reduced_dofs = 0;
    std::size_t rank = 0;
    pod::BasisCount choice;
    double fe_error = 0.0;
    double rom_error = 0.0;
    double speedup = 0.0;
    std::vector<double> eigenvalues;
    std::vector<ErrorRow> errors;
    rom::DiscrepancyReport discrepancy;
    std::vector<std::pair<std::string, double>> timing;
};

// Full FEM -> snapshots -> POD -> d -> ROM -> reports. With persist=true
// every artifact lands in cfg.output_dir.
BenchReport run_pipeline(const RunConfig& cfg, bool persist = true);

void write_errors_csv(const std::filesystem::path& path, const std::vector<ErrorRow>& rows);

struct ConvergenceRow {
    std::size_t n_cells = 0;
    double h = 0.0;
    double error = 0.0;
    double order = 0.0;  // log2(e_{i-1}/e_i); 0 on the first row
};

// Final-time L² error of the full FEM over a list of meshes at fixed τ.
std::vector<ConvergenceRow> convergence_study(Example ex, const std::vector<std::size_t>& n_cells, double tau,
                                              const RunConfig& base);
void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows);

}  // namespace podfem::bench
