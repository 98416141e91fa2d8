#include "erslp/simd/kernels.hpp"
#include "erslp/util/error.hpp"

#include <cstdlib>
#include <string>

namespace erslp::simd {

#ifndef ERSLP_HAVE_AVX2
const KernelTable* avx2_kernels() noexcept { return nullptr; }
#endif

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
                   __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& kernels_for(Isa isa) {
    if (!cpu_supports(isa)) {
        throw InputError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available on this CPU");
    }
    return isa == Isa::avx2 ? *avx2_kernels() : scalar_kernels();
}

namespace {

const KernelTable& select_table() noexcept {
    if (const char* forced = std::getenv("ERSLP_SIMD")) {
        const std::string_view name(forced);
        if (name == "scalar") return scalar_kernels();
        if (name == "avx2" && cpu_supports(Isa::avx2)) return *avx2_kernels();
    }
    if (cpu_supports(Isa::avx2)) return *avx2_kernels();
    return scalar_kernels();
}

}  // namespace

const KernelTable& active() noexcept {
    static const KernelTable& table = select_table();
    return table;
}

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace erslp::simd
