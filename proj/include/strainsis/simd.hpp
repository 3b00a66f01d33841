#pragma once

#include <cstddef>
#include <span>

// Dense arithmetic kernels used by the inner loops (quadrature sums, power
// iteration matvecs, vector updates). A scalar reference implementation is
// always available; on x86-64 an AVX2+FMA variant is selected at runtime.
// The two are equivalence-tested against each other; results may differ by
// roundoff because SIMD reductions reassociate.

namespace strainsis::simd {

enum class Isa { scalar, avx2 };

/// Currently selected instruction set.
Isa active_isa();

const char* isa_name(Isa isa);

/// Override the dispatch choice. Requests for an unsupported ISA fall back
/// to scalar. The environment variable STRAINSIS_ISA=scalar|avx2 is honored
/// once at startup.
void force_isa(Isa isa);

bool cpu_has_avx2();

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
/// l1 norm.
double asum(std::span<const double> a);
/// linf norm.
double amax(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);
/// y = A x with A dense row-major (rows x cols).
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);

// Reference kernels, exposed for equivalence tests.
namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double asum(std::span<const double> a);
double amax(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
} // namespace scalar

} // namespace strainsis::simd
