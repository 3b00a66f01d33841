#pragma once

#include "strainsis/simd.hpp"

// Internal: per-ISA kernel declarations for the dispatcher.

#if defined(__x86_64__) || defined(__i386__)
#define STRAINSIS_HAVE_X86 1
namespace strainsis::simd::avx2 {
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double asum(std::span<const double> a);
double amax(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
} // namespace strainsis::simd::avx2
#endif
