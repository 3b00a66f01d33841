#include "strainsis/operators.hpp"

#include <cassert>
#include <cmath>

#include "strainsis/errors.hpp"

namespace strainsis {

namespace {

void check_sizes(const ModelCoefficients& coeffs, const Grid& grid) {
    if (coeffs.n() != grid.n_cells) {
        throw validation_error("coefficients were sampled on a different grid");
    }
}

/// gamma-aware power with exact fast paths so that u^0 == 1 bitwise and
/// u^1 == u bitwise (0^0 is defined as 1).
double pow_gamma(double u, double g) {
    if (g == 0.0) return 1.0;
    if (g == 1.0) return u;
    return std::pow(u, g);
}

void add_kernel_block(DenseMatrix& a, const ModelCoefficients& coeffs, const Grid& grid,
                      double R, std::span<const double> weight) {
    const int n = a.rows();
    const double Rh = R * grid.h;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) += Rh * coeffs.beta(i, j) * weight[j];
        }
    }
}

} // namespace

OperatorMatrix assemble_diffusion(const ModelCoefficients& coeffs, const Grid& grid,
                                  bool include_reaction) {
    check_sizes(coeffs, grid);
    const int n = grid.n_cells;
    OperatorMatrix op;
    op.kind = OperatorKind::psi1;
    op.a = DenseMatrix(n, n);
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    for (int i = 0; i < n; ++i) {
        if (i + 1 < n) { // right face, omitted at the boundary (zero flux)
            const double d_face = 0.5 * (coeffs.d[i] + coeffs.d[i + 1]) * inv_h2;
            op.a(i, i + 1) += d_face;
            op.a(i, i) -= d_face;
        }
        if (i > 0) {
            const double d_face = 0.5 * (coeffs.d[i] + coeffs.d[i - 1]) * inv_h2;
            op.a(i, i - 1) += d_face;
            op.a(i, i) -= d_face;
        }
        if (include_reaction) op.a(i, i) -= coeffs.rho[i];
    }
    return op;
}

Tridiagonal diffusion_tridiagonal(const ModelCoefficients& coeffs, const Grid& grid) {
    check_sizes(coeffs, grid);
    const int n = grid.n_cells;
    Tridiagonal t;
    t.diag.assign(n, 0.0);
    t.lower.assign(n > 1 ? n - 1 : 0, 0.0);
    t.upper.assign(n > 1 ? n - 1 : 0, 0.0);
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    for (int i = 0; i < n; ++i) {
        if (i + 1 < n) {
            const double d_face = 0.5 * (coeffs.d[i] + coeffs.d[i + 1]) * inv_h2;
            t.upper[i] += d_face;
            t.diag[i] -= d_face;
        }
        if (i > 0) {
            const double d_face = 0.5 * (coeffs.d[i] + coeffs.d[i - 1]) * inv_h2;
            t.lower[i - 1] += d_face;
            t.diag[i] -= d_face;
        }
    }
    return t;
}

OperatorMatrix assemble_psi_R(const ModelCoefficients& coeffs, const Grid& grid, double R) {
    if (R < 0.0) throw validation_error("assemble_psi_R: R must be nonnegative");
    OperatorMatrix op = assemble_diffusion(coeffs, grid, /*include_reaction=*/true);
    op.kind = OperatorKind::psi_R;
    op.R = R;
    if (R > 0.0) {
        std::vector<double> ones(grid.n_cells, 1.0);
        add_kernel_block(op.a, coeffs, grid, R, ones);
    }
    return op;
}

OperatorMatrix assemble_psi_uR(const ModelCoefficients& coeffs, const Grid& grid,
                               std::span<const double> u, double R) {
    if (R < 0.0) throw validation_error("assemble_psi_uR: R must be nonnegative");
    if (static_cast<int>(u.size()) != grid.n_cells) {
        throw validation_error("assemble_psi_uR: u length does not match grid");
    }
    for (double ui : u) {
        if (ui < 0.0) throw validation_error("assemble_psi_uR: u must be nonnegative (parameter set C)");
    }
    OperatorMatrix op = assemble_diffusion(coeffs, grid, /*include_reaction=*/true);
    op.kind = OperatorKind::psi_uR;
    op.R = R;
    op.u.assign(u.begin(), u.end());
    if (R > 0.0) {
        std::vector<double> weight(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) weight[j] = pow_gamma(u[j], coeffs.gamma[j]);
        add_kernel_block(op.a, coeffs, grid, R, weight);
    }
    return op;
}

std::vector<double> superlinear_density(std::span<const double> v, const ModelCoefficients& coeffs) {
    assert(static_cast<int>(v.size()) == coeffs.n());
    std::vector<double> w(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double av = std::abs(v[j]);
        const double g = coeffs.gamma[j];
        if (g == 0.0) {
            w[j] = av;
        } else if (g == 1.0) {
            w[j] = av * av;
        } else {
            w[j] = std::pow(av, 1.0 + g);
        }
    }
    return w;
}

std::vector<double> infection_term(std::span<const double> v, double S,
                                   const ModelCoefficients& coeffs, const Grid& grid) {
    check_sizes(coeffs, grid);
    std::vector<double> w = superlinear_density(v, coeffs);
    std::vector<double> out(v.size());
    coeffs.beta.apply(w, out);
    simd::scal(S * grid.h, out);
    return out;
}

} // namespace strainsis
