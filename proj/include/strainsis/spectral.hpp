#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "strainsis/coefficients.hpp"
#include "strainsis/grid.hpp"
#include "strainsis/operators.hpp"

namespace strainsis {

/// Spectral bound s(A) of a Metzler matrix together with the strictly
/// positive Perron eigenvector (normalized to discrete W11 norm 1).
struct SpectralResult {
    double s = 0.0;
    std::vector<double> eigvec;
    int iterations = 0;
    double residual = 0.0; // h-weighted l1 eigen-residual of the returned pair
};

struct PowerOptions {
    double tol = 1e-10;
    int max_iterations = 100000;
    /// Previous Perron vector to warm-start from (bisection reuses these).
    std::span<const double> warm_start = {};
    /// When > 0, stop as soon as |s| exceeds this multiple of the current
    /// residual: the sign of s is then settled, which is all a bisection
    /// step needs. The root itself is always verified at full tolerance.
    double sign_certainty_factor = 0.0;
};

/// Shifted power iteration on M = A + (max|a_ii| + 1) I, which is entrywise
/// nonnegative and primitive for the assembled operators, so the iteration
/// converges to the Perron pair. Throws on non-Metzler input or stagnation.
SpectralResult spectral_bound(const OperatorMatrix& op, const Grid& grid,
                              const PowerOptions& opts = {});

/// Core routine on a bare matrix with plain l1 normalization; used by the
/// stability module's cross-check where no grid normalization applies.
SpectralResult perron_spectral_bound(const DenseMatrix& a, const PowerOptions& opts = {});

/// The unique S* with s(Psi_{S*}) = 0 for the bilinear (gamma == 0) model,
/// by bisection on [0, (r+1)/min_x int beta(x,y) dy]. Requires rho not
/// identically zero and strictly positive kernel row integrals.
double find_S_star(const ModelCoefficients& coeffs, const Grid& grid,
                   std::optional<std::pair<double, double>> bracket_hint = std::nullopt);

/// s(Psi_(theta c, R)) along the ray through c.
double spectral_bound_along_ray(const ModelCoefficients& coeffs, const Grid& grid,
                                std::span<const double> c, double R, double theta,
                                const PowerOptions& opts = {});

/// Minimum of x + (1-x)^Gamma over [0,1]: equals 1 for Gamma <= 1 and
/// 1 - Gamma^(1/(1-Gamma)) + Gamma^(Gamma/(1-Gamma)) for Gamma > 1.
double f_gamma_min(double Gamma);

/// Upper bracket (r+1) / (R * f_gamma_min(Gamma) * min beta) for the ray
/// scale at which the spectral bound has certainly turned positive.
/// Stated for Gamma >= 1 with strictly positive beta.
double theta_star_bound(const ModelCoefficients& coeffs, const Grid& grid, double R);

} // namespace strainsis
