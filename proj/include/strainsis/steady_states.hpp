#pragma once

#include <optional>
#include <span>
#include <vector>

#include "strainsis/coefficients.hpp"
#include "strainsis/grid.hpp"

namespace strainsis {

enum class SteadySolver { bilinear, fixed_point };

/// Endemic steady state (v*, S*) with its defect norms. kappa is the ray
/// scale theta* for the fixed-point solver and the eigenvector rescale for
/// the bilinear one.
struct SteadyState {
    std::vector<double> v_star;
    double S_star = 0.0;
    double residual_pde = 0.0;
    double residual_balance = 0.0;
    SteadySolver solver = SteadySolver::bilinear;
    double kappa = 0.0;
    int iterations = 0;
    /// Set when the coefficients fall outside the regime the construction is
    /// guaranteed for (gamma not identically 1); results are then labeled
    /// exploratory data.
    bool exploratory = false;
};

/// h-weighted l1 norm of the stationary defect
/// (d v')' - rho v + S int beta |v|^(1+gamma).
double stationary_residual(std::span<const double> v, double S,
                           const ModelCoefficients& coeffs, const Grid& grid);

/// |int rho v - S int int beta |v|^(1+gamma)|: the integrated form of the
/// stationary equation, verified rather than assumed.
double balance_residual(std::span<const double> v, double S,
                        const ModelCoefficients& coeffs, const Grid& grid);

/// Bilinear (gamma == 0) endemic state: S* from the spectral root, v* the
/// Perron eigenvector rescaled so quadrature(v*) = V_star, then polished by
/// one bordered Newton solve.
SteadyState endemic_bilinear(const ModelCoefficients& coeffs, const Grid& grid, double V_star);

struct PhiResult {
    std::vector<double> direction; // W11-normalized Perron eigenvector
    double theta_star = 0.0;       // level-set crossing along the ray
};

/// Ray-projection map: finds theta* with s(Psi_(theta* c, R)) = 0 (bisection
/// after bracketing by doubling) and returns the normalized Perron
/// eigenvector of Psi_(theta* c, R). For gamma == 0 the operator does not
/// depend on the ray at all and the Perron vector of Psi_R is returned.
PhiResult phi_R(std::span<const double> c, const ModelCoefficients& coeffs, const Grid& grid,
                double R, std::span<const double> eigvec_hint = {});

struct FixedPointOptions {
    int max_iterations = 500;
    double tol = 1e-9; // W11 increment
    /// Picard damping c <- (1-w) c + w Phi(c). The default 1 is the plain
    /// iteration; existence theory gives no contraction rate, so damping is
    /// available when oscillation shows up on rough coefficients.
    double damping = 1.0;
    std::optional<std::vector<double>> c0;
};

/// Endemic state for fixed susceptible size S* = R via Picard iteration on
/// phi_R, then a Newton polish of the full discrete stationary system.
SteadyState endemic_fixed_point(const ModelCoefficients& coeffs, const Grid& grid, double R,
                                const FixedPointOptions& opts = {});

struct SteadyStateCheck {
    double residual_pde = 0.0;
    double residual_balance = 0.0;
    double drift_l1 = 0.0;
    bool pde_ok = false;
    bool balance_ok = false;
    bool drift_ok = false;

    bool passed() const { return pde_ok && balance_ok && drift_ok; }
};

/// Recomputes both residuals from a fresh assembly and integrates the state
/// over one time unit (imex_cn, dt = 1e-3); flags rather than throws.
SteadyStateCheck verify_steady_state(const SteadyState& ss, const ModelCoefficients& coeffs,
                                     const Grid& grid, double residual_tol = 1e-7,
                                     double drift_tol = 1e-6);

} // namespace strainsis
