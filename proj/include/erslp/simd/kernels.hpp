#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense vector kernels behind every solver in the library. Each kernel has a portable
// scalar reference and an AVX2/FMA variant; the variant is picked once at startup from
// CPUID and can be pinned with ERSLP_SIMD=scalar|avx2. Variants differ only in
// summation order, so results agree to rounding but not bit-for-bit across ISAs.

namespace erslp::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*sum_squares)(const double* a, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // x *= alpha
    void (*scale)(double alpha, double* x, std::size_t n);
    // (x, y) <- (c*x - s*y, s*x + c*y)
    void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
};

[[nodiscard]] const KernelTable& scalar_kernels() noexcept;
/// nullptr when the binary was built without the AVX2 translation unit.
[[nodiscard]] const KernelTable* avx2_kernels() noexcept;

[[nodiscard]] bool cpu_supports(Isa isa) noexcept;
[[nodiscard]] const KernelTable& kernels_for(Isa isa);
/// The process-wide dispatched table.
[[nodiscard]] const KernelTable& active() noexcept;
[[nodiscard]] std::string_view isa_name(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }
inline double sum_squares(std::span<const double> a) {
    return active().sum_squares(a.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }
inline void rotate(std::span<double> x, std::span<double> y, double c, double s) {
    active().rotate(x.data(), y.data(), c, s, x.size());
}

}  // namespace erslp::simd
