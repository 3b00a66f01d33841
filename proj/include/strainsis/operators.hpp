#pragma once

#include <span>
#include <vector>

#include "strainsis/coefficients.hpp"
#include "strainsis/grid.hpp"
#include "strainsis/linalg.hpp"

namespace strainsis {

enum class OperatorKind { psi1, psi_R, psi_uR, linearization };

/// Dense discretization of one of the Psi-family operators. Immutable after
/// assembly; off-diagonal entries are nonnegative (Metzler) for the psi
/// kinds, which is what the Perron machinery relies on.
struct OperatorMatrix {
    DenseMatrix a;
    OperatorKind kind = OperatorKind::psi1;
    double R = 0.0;
    std::vector<double> u; // empty unless kind == psi_uR

    int n() const { return a.rows(); }
};

/// Finite-volume diffusion stencil with zero-flux boundaries; face diffusion
/// is the arithmetic mean of the adjacent cell samples. With include_reaction
/// the -rho diagonal is added, giving Psi^1.
OperatorMatrix assemble_diffusion(const ModelCoefficients& coeffs, const Grid& grid,
                                  bool include_reaction = false);

/// Same stencil in tridiagonal form, for the implicit time-stepping solves.
Tridiagonal diffusion_tridiagonal(const ModelCoefficients& coeffs, const Grid& grid);

/// Psi_R = diffusion - diag(rho) + R * h * beta  (the gamma == 0 operator).
OperatorMatrix assemble_psi_R(const ModelCoefficients& coeffs, const Grid& grid, double R);

/// Psi_(u,R) = diffusion - diag(rho) + R * h * beta * diag(u_j^gamma_j),
/// with 0^0 := 1 so gamma == 0 reduces bitwise to Psi_R.
OperatorMatrix assemble_psi_uR(const ModelCoefficients& coeffs, const Grid& grid,
                               std::span<const double> u, double R);

/// w_j = |v_j|^(1 + gamma_j). The absolute value follows the model's
/// convention for the nonlinear term off the positive cone.
std::vector<double> superlinear_density(std::span<const double> v, const ModelCoefficients& coeffs);

/// out_i = S * h * sum_j beta_ij |v_j|^(1+gamma_j)
std::vector<double> infection_term(std::span<const double> v, double S,
                                   const ModelCoefficients& coeffs, const Grid& grid);

} // namespace strainsis
