#include "simd_impl.hpp"

#include <cstdlib>
#include <cstring>

namespace strainsis::simd {

bool cpu_has_avx2() {
#if defined(STRAINSIS_HAVE_X86) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Isa detect() {
    if (const char* env = std::getenv("STRAINSIS_ISA")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Isa::avx2;
        return Isa::scalar;
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

Isa g_isa = detect();

} // namespace

Isa active_isa() { return g_isa; }

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::avx2: return "avx2";
        case Isa::scalar: return "scalar";
    }
    return "scalar";
}

void force_isa(Isa isa) {
    if (isa == Isa::avx2 && !cpu_has_avx2()) isa = Isa::scalar;
    g_isa = isa;
}

#if defined(STRAINSIS_HAVE_X86)
#define STRAINSIS_DISPATCH(fn, ...)                          \
    if (g_isa == Isa::avx2) return avx2::fn(__VA_ARGS__);    \
    return scalar::fn(__VA_ARGS__)
#else
#define STRAINSIS_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(std::span<const double> a, std::span<const double> b) {
    STRAINSIS_DISPATCH(dot, a, b);
}

double sum(std::span<const double> a) { STRAINSIS_DISPATCH(sum, a); }

double asum(std::span<const double> a) { STRAINSIS_DISPATCH(asum, a); }

double amax(std::span<const double> a) { STRAINSIS_DISPATCH(amax, a); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    STRAINSIS_DISPATCH(axpy, alpha, x, y);
}

void scal(double alpha, std::span<double> x) {
    STRAINSIS_DISPATCH(scal, alpha, x);
}

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
    STRAINSIS_DISPATCH(matvec, a, rows, cols, x, y);
}

} // namespace strainsis::simd
