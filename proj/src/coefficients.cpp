#include "strainsis/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "strainsis/errors.hpp"

namespace strainsis {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double interp_table(const std::vector<std::pair<double, double>>& knots, double x) {
    if (knots.empty()) throw validation_error("tabulated coefficient has no knots");
    if (x <= knots.front().first) return knots.front().second;
    if (x >= knots.back().first) return knots.back().second;
    for (std::size_t k = 1; k < knots.size(); ++k) {
        if (x <= knots[k].first) {
            const auto& [x0, v0] = knots[k - 1];
            const auto& [x1, v1] = knots[k];
            const double t = (x - x0) / (x1 - x0);
            return v0 + t * (v1 - v0);
        }
    }
    return knots.back().second;
}

double interp_1d(const std::vector<double>& xs, std::span<const double> vals, double x, int stride) {
    if (x <= xs.front()) return vals[0];
    if (x >= xs.back()) return vals[(xs.size() - 1) * stride];
    auto hi = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t k = static_cast<std::size_t>(hi - xs.begin());
    const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return vals[(k - 1) * stride] + t * (vals[k * stride] - vals[(k - 1) * stride]);
}

} // namespace

double evaluate(const FunctionSpec& spec, double x) {
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ConstantFn>) {
                return f.value;
            } else if constexpr (std::is_same_v<T, LinearFn>) {
                return f.intercept + f.slope * x;
            } else if constexpr (std::is_same_v<T, GaussianFn>) {
                const double z = (x - f.center) / f.width;
                return f.floor_value + f.amplitude * std::exp(-z * z);
            } else if constexpr (std::is_same_v<T, CosineFn>) {
                return f.offset + f.amplitude * std::cos(f.mode * kPi * x);
            } else {
                return interp_table(f.knots, x);
            }
        },
        spec);
}

std::vector<double> sample(const FunctionSpec& spec, const Grid& grid) {
    std::vector<double> out(grid.n_cells);
    for (int i = 0; i < grid.n_cells; ++i) out[i] = evaluate(spec, grid.centers[i]);
    return out;
}

double evaluate(const KernelSpec& spec, double x, double y) {
    return std::visit(
        [x, y](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ConstantKernel>) {
                return k.value;
            } else if constexpr (std::is_same_v<T, GaussianKernel>) {
                const double z = (x - y) / k.width;
                return k.floor_value + k.amplitude * std::exp(-z * z);
            } else if constexpr (std::is_same_v<T, SeparableKernel>) {
                return evaluate(k.fx, x) * evaluate(k.fy, y);
            } else {
                // Bilinear on the tensor grid, clamped at the edges.
                if (x <= k.xs.front() || k.xs.size() == 1) {
                    return interp_1d(k.ys, k.values.row(0), y, 1);
                }
                if (x >= k.xs.back()) {
                    return interp_1d(k.ys, k.values.row(k.values.rows() - 1), y, 1);
                }
                auto hi = std::upper_bound(k.xs.begin(), k.xs.end(), x);
                const int r = static_cast<int>(hi - k.xs.begin());
                const double t = (x - k.xs[r - 1]) / (k.xs[r] - k.xs[r - 1]);
                const double lo_v = interp_1d(k.ys, k.values.row(r - 1), y, 1);
                const double hi_v = interp_1d(k.ys, k.values.row(r), y, 1);
                return lo_v + t * (hi_v - lo_v);
            }
        },
        spec);
}

bool ModelCoefficients::gamma_is_zero() const {
    return std::all_of(gamma.begin(), gamma.end(), [](double g) { return g == 0.0; });
}

ModelCoefficients sample_coefficients(const CoefficientSpec& spec, const Grid& grid) {
    ModelCoefficients c;
    c.d = sample(spec.d, grid);
    c.rho = sample(spec.rho, grid);
    c.gamma = sample(spec.gamma, grid);
    const int n = grid.n_cells;
    c.beta = DenseMatrix(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            c.beta(i, j) = evaluate(spec.beta, grid.centers[i], grid.centers[j]);
        }
    }

    const double d_min = *std::min_element(c.d.begin(), c.d.end());
    if (d_min <= 0.0) {
        throw validation_error("d below d0 bound: diffusion must satisfy 0 < d0 <= d, but min d = " +
                               std::to_string(d_min));
    }
    const double rho_min = *std::min_element(c.rho.begin(), c.rho.end());
    if (rho_min < 0.0) throw validation_error("rho must be nonnegative");
    const double gamma_min = *std::min_element(c.gamma.begin(), c.gamma.end());
    if (gamma_min < 0.0) throw validation_error("gamma must be nonnegative");
    double beta_lo = c.beta(0, 0), beta_hi = c.beta(0, 0);
    for (double b : c.beta.data()) {
        beta_lo = std::min(beta_lo, b);
        beta_hi = std::max(beta_hi, b);
    }
    if (beta_lo < 0.0) throw validation_error("beta must be nonnegative");

    c.bounds.d0 = d_min;
    double d_hi = 0.0, slope_hi = 0.0;
    for (int i = 0; i < n; ++i) {
        d_hi = std::max(d_hi, std::abs(c.d[i]));
        if (i > 0) slope_hi = std::max(slope_hi, std::abs(c.d[i] - c.d[i - 1]) / grid.h);
    }
    c.bounds.d1 = d_hi + slope_hi;
    c.bounds.r = *std::max_element(c.rho.begin(), c.rho.end());
    c.bounds.b = beta_hi;
    c.bounds.Gamma = *std::max_element(c.gamma.begin(), c.gamma.end());
    c.beta_min = beta_lo;
    return c;
}

} // namespace strainsis
