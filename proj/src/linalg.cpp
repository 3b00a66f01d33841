#include "strainsis/linalg.hpp"

#include <cassert>
#include <cmath>

#include "strainsis/errors.hpp"

namespace strainsis {

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
    const int m = n();
    assert(static_cast<int>(x.size()) == m);
    std::vector<double> y(m);
    for (int i = 0; i < m; ++i) {
        double acc = diag[i] * x[i];
        if (i > 0) acc += lower[i - 1] * x[i - 1];
        if (i < m - 1) acc += upper[i] * x[i + 1];
        y[i] = acc;
    }
    return y;
}

void Tridiagonal::solve(std::span<double> rhs) const {
    const int m = n();
    assert(static_cast<int>(rhs.size()) == m);
    std::vector<double> c(m - 1 > 0 ? m - 1 : 0);
    std::vector<double> d(m);
    double denom = diag[0];
    if (denom == 0.0) throw solver_error("tridiagonal solve hit a zero pivot");
    if (m > 1) c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for (int i = 1; i < m; ++i) {
        denom = diag[i] - lower[i - 1] * c[i - 1];
        if (denom == 0.0) throw solver_error("tridiagonal solve hit a zero pivot");
        if (i < m - 1) c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
    }
    rhs[m - 1] = d[m - 1];
    for (int i = m - 2; i >= 0; --i) rhs[i] = d[i] - c[i] * rhs[i + 1];
}

Tridiagonal Tridiagonal::identity_minus(double c) const {
    Tridiagonal out;
    out.lower.resize(lower.size());
    out.upper.resize(upper.size());
    out.diag.resize(diag.size());
    for (std::size_t i = 0; i < lower.size(); ++i) out.lower[i] = -c * lower[i];
    for (std::size_t i = 0; i < upper.size(); ++i) out.upper[i] = -c * upper[i];
    for (std::size_t i = 0; i < diag.size(); ++i) out.diag[i] = 1.0 - c * diag[i];
    return out;
}

LuFactors lu_factor(DenseMatrix a) {
    const int n = a.rows();
    assert(a.cols() == n);
    LuFactors f;
    f.pivots.resize(n);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        }
        f.pivots[k] = piv;
        if (best == 0.0) {
            f.singular = true;
            f.lu = std::move(a);
            return f;
        }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
        }
        const double inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double m = a(i, k) * inv;
            a(i, k) = m;
            if (m != 0.0) {
                for (int j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
            }
        }
    }
    f.lu = std::move(a);
    return f;
}

void LuFactors::solve(std::span<double> rhs) const {
    if (singular) throw solver_error("dense solve on a singular matrix");
    const int n = lu.rows();
    assert(static_cast<int>(rhs.size()) == n);
    for (int k = 0; k < n; ++k) {
        if (pivots[k] != k) std::swap(rhs[k], rhs[pivots[k]]);
        for (int i = k + 1; i < n; ++i) rhs[i] -= lu(i, k) * rhs[k];
    }
    for (int i = n - 1; i >= 0; --i) {
        double acc = rhs[i];
        for (int j = i + 1; j < n; ++j) acc -= lu(i, j) * rhs[j];
        rhs[i] = acc / lu(i, i);
    }
}

} // namespace strainsis
