#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strainsis/coefficients.hpp"
#include "strainsis/grid.hpp"
#include "strainsis/linalg.hpp"

namespace strainsis {

/// Finite-strain SIS system: n infected compartments coupled by mutation
/// rates d_matrix, recovery rho, and the superlinear infection kernel beta
/// with per-strain exponents gamma.
struct OdeSystem {
    int n_strains = 1;
    DenseMatrix d_matrix; // d_matrix(i,j): mutation rate from strain j into i
    std::vector<double> rho;
    DenseMatrix beta;
    std::vector<double> gamma;

    static OdeSystem single_strain(double rho, double beta, double gamma);
    void validate() const;
};

struct OdeState {
    std::vector<double> I;
    double S = 0.0;
    double t = 0.0;

    double total_population() const;
};

struct OdeDerivative {
    std::vector<double> dI;
    double dS = 0.0;
};

/// Right-hand side; the components cancel exactly, so sum(dI) + dS == 0 up
/// to roundoff.
OdeDerivative ode_rhs(const OdeState& state, const OdeSystem& sys);

enum class OdeMethod { rk4, adaptive };

struct OdeTrajectory {
    std::vector<OdeState> states;
    bool aborted = false;        // blow-up proximity: step underflow/overflow
    std::string abort_reason;
    double max_conservation_drift = 0.0;

    const OdeState& back() const { return states.back(); }
};

/// Fixed-step RK4 or an adaptive embedded Dormand-Prince 4(5) pair. The
/// adaptive path is the high-accuracy oracle for PDE cross-validation and
/// aborts in a controlled way when step sizes underflow near blow-up.
/// pin_S freezes the susceptible compartment (test hook: with S pinned the
/// single-strain system is exactly the Bernoulli equation, which is the
/// blow-up baseline; conservation is deliberately off then).
OdeTrajectory ode_integrate(const OdeState& state0, const OdeSystem& sys, double dt,
                            double t_end, OdeMethod method, double tol = 1e-10,
                            int store_every = 1,
                            std::optional<double> pin_S = std::nullopt);

/// Critical population size P-bar for the single-strain model with gamma>0;
/// above it there are two positive equilibria.
double critical_population_size(const OdeSystem& sys);

/// Positive equilibria (V, S) of the single-strain model at total
/// population P_star. Returns 0, 1 (tangent), or 2 solutions. gamma == 0 is
/// the bilinear special case: an equilibrium exists only if S = rho/beta.
std::vector<std::pair<double, double>> ode_endemic_equilibria(const OdeSystem& sys, double P_star);

/// The unique positive steady state (V, S) at fixed susceptible size S:
/// V = (rho / (beta S))^(1/gamma).
std::pair<double, double> ode_endemic_for_S(const OdeSystem& sys, double S);

/// Closed-form blow-up time of dv/dt = -rho v + beta v^p (p > 1); nullopt
/// when the solution decays instead (beta v0^(p-1) <= rho).
std::optional<double> ode_blowup_exact(double rho, double beta, double p, double v0);

/// The PDE semi-discretization rewritten exactly as an OdeSystem in the
/// per-cell populations I_i = h v_i: nearest-neighbor mutation rates from
/// the diffusion stencil and beta_ij * h^(1-gamma_j) as the ODE kernel.
/// This bridge exists for cross-validation; it is a discretization
/// identity, not part of the model itself.
OdeSystem ode_system_from_pde(const ModelCoefficients& coeffs, const Grid& grid);

} // namespace strainsis
