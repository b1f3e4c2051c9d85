#include "podfem/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace podfem::kernels {

namespace {

constexpr KernelTable scalar_table{&scalar::dot, &scalar::axpy, &scalar::gemv};
#if defined(PODFEM_HAVE_AVX2)
constexpr KernelTable avx2_table{&avx2::dot, &avx2::axpy, &avx2::gemv};
#endif

Isa pick_isa() {
    if (const char* env = std::getenv("PODFEM_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return Isa::scalar;
        if (want == "avx2" && cpu_supports(Isa::avx2)) return Isa::avx2;
    }
    return cpu_supports(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

}  // namespace

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(PODFEM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table(Isa isa) {
    if (!cpu_supports(isa)) {
        throw std::invalid_argument("kernel ISA not available: " + std::string(isa_name(isa)));
    }
#if defined(PODFEM_HAVE_AVX2)
    if (isa == Isa::avx2) return avx2_table;
#endif
    return scalar_table;
}

Isa active_isa() {
    static const Isa isa = pick_isa();
    return isa;
}

std::string_view isa_name(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

}  // namespace podfem::kernels
