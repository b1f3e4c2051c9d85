#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "podfem/bench.hpp"
#include "podfem/error.hpp"

namespace podfem::bench {

namespace {

using Magic = std::array<char, 8>;
constexpr Magic kTrajectoryMagic{'P', 'O', 'D', 'F', 'E', 'M', '1', '\0'};
constexpr Magic kBasisMagic{'P', 'O', 'D', 'B', 'A', 'S', '1', '\0'};
constexpr Magic kReducedMagic{'P', 'O', 'D', 'R', 'O', 'M', '1', '\0'};

class Writer {
  public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
        if (!out_) throw ConfigError("cannot write " + path.string());
    }
    void magic(const Magic& m) { out_.write(m.data(), m.size()); }
    void u64(std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out_.write(reinterpret_cast<const char*>(b), 8);
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void finish() {
        out_.flush();
        if (!out_) throw ConfigError("write failed for " + path_.string());
    }

  private:
    std::ofstream out_;
    std::filesystem::path path_;
};

class Reader {
  public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw ConfigError("cannot open " + path.string());
    }
    void expect(const Magic& m) {
        Magic got{};
        in_.read(got.data(), got.size());
        if (!in_ || got != m) throw ConfigError(path_.string() + ": bad magic, expected " + std::string(m.data()));
    }
    std::uint64_t u64() {
        unsigned char b[8];
        in_.read(reinterpret_cast<char*>(b), 8);
        if (!in_) throw ConfigError(path_.string() + ": truncated file");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }

  private:
    std::ifstream in_;
    std::filesystem::path path_;
};

void ensure_parent(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

std::string real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

}  // namespace

void write_trajectory(const std::filesystem::path& path, const fem::Trajectory& traj, const TrajectoryHeader& header) {
    if (traj.states.size() != header.n_steps + 1) throw ParameterError("trajectory length does not match header");
    ensure_parent(path);
    Writer w(path);
    w.magic(kTrajectoryMagic);
    w.u64(header.nx);
    w.u64(header.ny);
    w.u64(header.n_steps);
    w.f64(header.tau);
    w.f64(header.alpha);
    w.f64(header.beta);
    for (const auto& s : traj.states) {
        if (s.size() != header.nx * header.ny) throw ParameterError("trajectory state has wrong length");
        for (double v : s) w.f64(v);
    }
    w.finish();
}

std::pair<TrajectoryHeader, fem::Trajectory> read_trajectory(const std::filesystem::path& path) {
    Reader r(path);
    r.expect(kTrajectoryMagic);
    TrajectoryHeader h;
    h.nx = r.u64();
    h.ny = r.u64();
    h.n_steps = r.u64();
    h.tau = r.f64();
    h.alpha = r.f64();
    h.beta = r.f64();
    fem::Trajectory traj;
    traj.spill_path = path;
    for (std::uint64_t n = 0; n <= h.n_steps; ++n) {
        Vector s(h.nx * h.ny);
        for (double& v : s) v = r.f64();
        traj.times.push_back(static_cast<double>(n) * h.tau);
        traj.states.push_back(std::move(s));
    }
    return {h, std::move(traj)};
}

void write_basis(const std::filesystem::path& path, const pod::PODBasis& basis) {
    ensure_parent(path);
    Writer w(path);
    w.magic(kBasisMagic);
    w.u64(basis.dofs());
    w.u64(basis.psi.rows());
    w.u64(basis.eigenvalues.size());
    for (double lam : basis.eigenvalues) w.f64(lam);
    for (std::size_t k = 0; k < basis.psi.rows(); ++k)
        for (double v : basis.psi.row(k)) w.f64(v);
    w.finish();
}

pod::PODBasis read_basis(const std::filesystem::path& path) {
    Reader r(path);
    r.expect(kBasisMagic);
    const std::uint64_t m = r.u64();
    const std::uint64_t d = r.u64();
    const std::uint64_t count = r.u64();
    pod::PODBasis basis;
    basis.d = d;
    basis.snapshot_count = count;
    basis.eigenvalues.resize(count);
    for (double& lam : basis.eigenvalues) lam = r.f64();
    basis.psi = Matrix(d, m);
    for (std::size_t i = 0; i < d * m; ++i) basis.psi.data()[i] = r.f64();
    return basis;
}

void write_reduced(const std::filesystem::path& path, const rom::ReducedTrajectory& red, double tau) {
    ensure_parent(path);
    Writer w(path);
    w.magic(kReducedMagic);
    const std::size_t d = red.coeffs.empty() ? 0 : red.coeffs.front().size();
    w.u64(d);
    w.u64(red.steps());
    w.f64(tau);
    for (const auto& c : red.coeffs)
        for (double v : c) w.f64(v);
    w.finish();
}

rom::ReducedTrajectory read_reduced(const std::filesystem::path& path) {
    Reader r(path);
    r.expect(kReducedMagic);
    const std::uint64_t d = r.u64();
    const std::uint64_t n_steps = r.u64();
    const double tau = r.f64();
    rom::ReducedTrajectory red;
    for (std::uint64_t n = 0; n <= n_steps; ++n) {
        Vector c(d);
        for (double& v : c) v = r.f64();
        red.times.push_back(static_cast<double>(n) * tau);
        red.coeffs.push_back(std::move(c));
    }
    return red;
}

void write_eigs_csv(const std::filesystem::path& path, const std::vector<double>& eigenvalues) {
    auto out = open_csv(path);
    out << "k,lambda,tail_sum\n";
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        out << (k + 1) << ',' << real(eigenvalues[k]) << ',' << real(pod::tail_sum(eigenvalues, k + 1)) << '\n';
    }
}

void write_discrepancy_csv(const std::filesystem::path& path, const rom::DiscrepancyReport& report) {
    auto out = open_csv(path);
    out << "n,t_n,l2_discrepancy,bound_pod_term,bound_tau_term\n";
    for (const auto& row : report.rows) {
        out << row.n << ',' << real(row.t) << ',' << real(row.l2) << ',' << real(row.pod_term) << ','
            << real(row.tau_term) << '\n';
    }
}

void write_timing_csv(const std::filesystem::path& path, const std::vector<std::pair<std::string, double>>& timing) {
    auto out = open_csv(path);
    out << "phase,seconds\n";
    for (const auto& [phase, seconds] : timing) out << phase << ',' << real(seconds) << '\n';
}

void write_trajectory_csv(const std::filesystem::path& path, const fem::Trajectory& traj, const fem::TensorMesh& mesh,
                          const std::vector<std::size_t>& steps) {
    auto out = open_csv(path);
    out << "n,t,dof,x,y,value\n";
    for (std::size_t n : steps) {
        if (n >= traj.states.size()) throw ParameterError("trajectory CSV: step out of range");
        for (std::size_t q = 0; q < mesh.ny(); ++q) {
            for (std::size_t p = 0; p < mesh.nx(); ++p) {
                const std::size_t dof = mesh.index(p, q);
                out << n << ',' << real(traj.times[n]) << ',' << dof << ',' << real(mesh.x(p)) << ','
                    << real(mesh.y(q)) << ',' << real(traj.states[n][dof]) << '\n';
            }
        }
    }
}

void write_errors_csv(const std::filesystem::path& path, const std::vector<ErrorRow>& rows) {
    auto out = open_csv(path);
    out << "d,rom_l2_error_T,fe_l2_error_T\n";
    for (const auto& row : rows) out << row.d << ',' << real(row.rom_error) << ',' << real(row.fe_error) << '\n';
}

void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows) {
    auto out = open_csv(path);
    out << "n_cells,h,l2_error_T,observed_order\n";
    for (const auto& row : rows) {
        out << row.n_cells << ',' << real(row.h) << ',' << real(row.error) << ',' << real(row.order) << '\n';
    }
}

}  // namespace podfem::bench
