#pragma once

// Data-parallel inner loops shared by the assembly, time stepping and
// fractional-difference code. Every kernel has a scalar reference version;
// an AVX2/FMA version is compiled when the toolchain targets x86-64 and is
// picked at runtime when the CPU supports it.
//
// Set PODFEM_SIMD=scalar in the environment to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace podfem::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y = A x with A row-major rows x cols.
    void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace scalar

#if defined(PODFEM_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
}  // namespace avx2
#endif

bool cpu_supports(Isa isa);

// Kernel table for a specific ISA. Throws std::invalid_argument if the ISA
// was not compiled in or the CPU lacks it.
const KernelTable& table(Isa isa);

// ISA chosen once per process (best supported, or PODFEM_SIMD override).
Isa active_isa();
std::string_view isa_name(Isa isa);

inline const KernelTable& active() { return table(active_isa()); }

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace podfem::kernels
