#include "strainsis/simd.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cassert>
#include <cmath>

// AVX2+FMA kernels. Compiled with per-function target attributes so the
// translation unit builds without -mavx2 and the binary stays runnable on
// machines without AVX2 (dispatch never routes here in that case).

#define STRAINSIS_AVX2 __attribute__((target("avx2,fma")))

namespace strainsis::simd::avx2 {

STRAINSIS_AVX2
static inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

STRAINSIS_AVX2
double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i),
                               _mm256_loadu_pd(b.data() + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4),
                               _mm256_loadu_pd(b.data() + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i),
                               _mm256_loadu_pd(b.data() + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

STRAINSIS_AVX2
double sum(std::span<const double> a) {
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a.data() + i));
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) acc += a[i];
    return acc;
}

STRAINSIS_AVX2
double asum(std::span<const double> a) {
    const std::size_t n = a.size();
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_and_pd(mask, _mm256_loadu_pd(a.data() + i)));
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) acc += std::abs(a[i]);
    return acc;
}

STRAINSIS_AVX2
double amax(std::span<const double> a) {
    const std::size_t n = a.size();
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        m = _mm256_max_pd(m, _mm256_and_pd(mask, _mm256_loadu_pd(a.data() + i)));
    }
    __m128d lo = _mm256_castpd256_pd128(m);
    __m128d hi = _mm256_extractf128_pd(m, 1);
    lo = _mm_max_pd(lo, hi);
    double out = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) out = std::max(out, std::abs(a[i]));
    return out;
}

STRAINSIS_AVX2
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y.data() + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy);
        _mm256_storeu_pd(y.data() + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

STRAINSIS_AVX2
void scal(double alpha, std::span<double> x) {
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x.data() + i,
                         _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i)));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

STRAINSIS_AVX2
void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
    assert(a.size() == rows * cols);
    assert(x.size() == cols && y.size() == rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = a.data() + i * cols;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 8 <= cols; j += 8) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j),
                                   _mm256_loadu_pd(x.data() + j), acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j + 4),
                                   _mm256_loadu_pd(x.data() + j + 4), acc1);
        }
        for (; j + 4 <= cols; j += 4) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j),
                                   _mm256_loadu_pd(x.data() + j), acc0);
        }
        double acc = hsum(_mm256_add_pd(acc0, acc1));
        for (; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

} // namespace strainsis::simd::avx2

#endif // x86
