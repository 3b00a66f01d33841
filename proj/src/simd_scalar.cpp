#include "strainsis/simd.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace strainsis::simd::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double sum(std::span<const double> a) {
    double acc = 0.0;
    for (double v : a) acc += v;
    return acc;
}

double asum(std::span<const double> a) {
    double acc = 0.0;
    for (double v : a) acc += std::abs(v);
    return acc;
}

double amax(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scal(double alpha, std::span<double> x) {
    for (double& v : x) v *= alpha;
}

void matvec(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
    assert(a.size() == rows * cols);
    assert(x.size() == cols && y.size() == rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = a.data() + i * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

} // namespace strainsis::simd::scalar
