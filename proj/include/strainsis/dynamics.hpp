#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strainsis/coefficients.hpp"
#include "strainsis/grid.hpp"
#include "strainsis/operators.hpp"

namespace strainsis {

/// Grid function of infected densities plus the susceptible scalar. The
/// total population P_star is fixed at construction; the integrator keeps
/// quadrature(v) + S equal to it by updating S from the conservation law.
struct State {
    std::vector<double> v;
    double S = 0.0;
    double t = 0.0;
    double P_star = 0.0;

    static State from_initial(std::vector<double> v0, double S0, const Grid& grid);

    double mass_error(const Grid& grid) const;
    void validate(const Grid& grid) const;
};

enum class Scheme { imex_euler, imex_cn };

struct IntegratorConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::imex_cn;
    int snapshot_every = 1;
    /// When set, integrate() notes roundoff-scale undershoots on stderr
    /// (they are tolerated; larger violations always abort).
    bool positivity_floor_report = false;

    void validate() const;
    bool operator==(const IntegratorConfig&) const = default;
};

struct StepDiagnostics {
    double t = 0.0;
    double S = 0.0;
    double mass_error = 0.0;
    double min_v = 0.0;
    double linf_v = 0.0;
    double w11_norm = 0.0;
    /// |S - S_indep| where S_indep integrates the susceptible equation
    /// directly instead of using the conservation update; O(dt) per scheme
    /// order, kept as a drift cross-check.
    double s_indep_error = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> snapshots;
    std::vector<StepDiagnostics> diagnostics;
    /// Most negative density seen (roundoff undershoots live in
    /// [-1e-12 P*, 0]; anything lower aborts the run instead).
    double worst_min_v = 0.0;

    const State& final_state() const { return snapshots.back(); }
    double max_mass_error() const;
};

/// Reciprocal Lipschitz-scale bound on the explicit terms; explicit stepping
/// is safe for dt below this. Returns +inf when the explicit part vanishes.
double estimate_dt_max(const State& state, const ModelCoefficients& coeffs, const Grid& grid);

/// One IMEX step: diffusion implicit (backward Euler, or trapezoidal for
/// imex_cn with a predictor-corrector pass on the explicit part), reaction
/// and infection explicit. S is then set to P_star - quadrature(v), which
/// enforces conservation exactly.
State step(const State& state, const ModelCoefficients& coeffs, const Grid& grid,
           const IntegratorConfig& cfg);

/// Integrates to t_end, recording diagnostics every step and snapshots every
/// snapshot_every steps. Requires Gamma <= 1 (the global-existence regime);
/// the blow-up harness has its own entry point for Gamma > 1.
Trajectory integrate(const State& state0, const ModelCoefficients& coeffs, const Grid& grid,
                     const IntegratorConfig& cfg);

namespace detail {

/// Stepper shared by integrate and the blow-up harness: no Gamma gate, an
/// optional pinned S (test hook that decouples the susceptible equation),
/// and reusable workspace.
class ImexStepper {
  public:
    ImexStepper(const ModelCoefficients& coeffs, const Grid& grid, Scheme scheme,
                std::optional<double> pin_S = std::nullopt);

    /// Advances the state by dt in place. Throws positivity_error when the
    /// updated density dips below -1e-12 * P_star.
    void advance(State& state, double dt);

    /// Independently integrated susceptible compartment (diagnostic).
    double independent_S() const { return s_indep_; }
    void reset_independent_S(double S0) { s_indep_ = S0; }

  private:
    const ModelCoefficients& coeffs_;
    const Grid& grid_;
    Scheme scheme_;
    std::optional<double> pin_S_;
    Tridiagonal diffusion_;
    double s_indep_ = 0.0;
};

} // namespace detail

} // namespace strainsis
