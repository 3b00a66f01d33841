#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strainsis/coefficients.hpp"
#include "strainsis/grid.hpp"
#include "strainsis/linalg.hpp"
#include "strainsis/steady_states.hpp"

namespace strainsis {

/// Dense (n+1) x (n+1) generator of the linearized flow acting on the
/// perturbation (w, R). Mass-neutrality holds by construction: the h-weighted
/// sum of the first n rows plus the last row is the zero functional.
struct LinearizationMatrix {
    DenseMatrix a; // (n_cells + 1) square
    int n_cells = 0;
};

/// Linearization about a verified endemic steady state.
LinearizationMatrix assemble_linearization(const SteadyState& ss, const ModelCoefficients& coeffs,
                                           const Grid& grid);

/// Linearization about the semi-trivial pair (0, S_star).
LinearizationMatrix assemble_linearization_disease_free(double S_star,
                                                        const ModelCoefficients& coeffs,
                                                        const Grid& grid);

/// Largest violation of the mass-neutrality column identity.
double mass_neutrality_defect(const LinearizationMatrix& lin, const Grid& grid);

/// Restriction of the linearization to the mass-zero subspace
/// {(w, R) : h sum w + R = 0}, expressed in the explicit basis (e_i, -h).
/// The reduced matrix is n x n: entries L[i][j] - h L[i][n].
DenseMatrix mass_zero_projection(const LinearizationMatrix& lin, const Grid& grid);

struct AbscissaOptions {
    double tol = 1e-3;
    int ensemble = 8;
    std::uint64_t seed = 0x5eed;
    double first_horizon = 2.0;
    int max_doublings = 10;
    int steps_per_horizon = 4096;
    /// Shifted power iteration cross-check, attempted when the matrix is
    /// Metzler (true about disease-free states). Budget-capped; silently
    /// absent when it fails to converge.
    bool perron_crosscheck = true;
};

struct AbscissaReport {
    double abscissa = 0.0;
    double ci_halfwidth = 0.0;
    bool oscillatory = false;
    double horizon = 0.0;
    std::vector<double> ensemble_rates;
    std::optional<double> perron_crosscheck;
    std::string note;
};

/// Dominant growth rate of w' = L w estimated from an ensemble of implicit
/// (trapezoidal) integrations with log-norm slope fitting over doubling
/// horizons. Robust where the linearization is not Metzler; never throws on
/// a poor fit, it flags instead.
AbscissaReport spectral_abscissa(const DenseMatrix& l, const AbscissaOptions& opts = {});
AbscissaReport spectral_abscissa(const LinearizationMatrix& lin, const AbscissaOptions& opts = {});

/// Log-norm slope of a single trajectory from w0 (full-window fit); with an
/// eigenvector start this is the corresponding eigenvalue up to O(dt^2).
double fitted_mode_rate(const DenseMatrix& l, std::span<const double> w0, double horizon,
                        int steps);

} // namespace strainsis
