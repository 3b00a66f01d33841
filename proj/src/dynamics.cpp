#include "strainsis/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "strainsis/errors.hpp"
#include "strainsis/simd.hpp"

namespace strainsis {

State State::from_initial(std::vector<double> v0, double S0, const Grid& grid) {
    if (static_cast<int>(v0.size()) != grid.n_cells) {
        throw validation_error("initial v0 length does not match grid");
    }
    for (double vi : v0)
        if (vi < 0.0) throw validation_error("initial infected density must be nonnegative");
    if (S0 < 0.0) throw validation_error("initial susceptible count must be nonnegative");
    State s;
    s.v = std::move(v0);
    s.S = S0;
    s.t = 0.0;
    s.P_star = quadrature(s.v, grid) + S0;
    return s;
}

double State::mass_error(const Grid& grid) const {
    return std::abs(quadrature(v, grid) + S - P_star);
}

void State::validate(const Grid& grid) const {
    if (static_cast<int>(v.size()) != grid.n_cells) throw validation_error("state length mismatch");
    if (mass_error(grid) > 1e-10 * std::max(1.0, P_star)) {
        throw validation_error("state violates conservation: quadrature(v) + S != P_star");
    }
}

void IntegratorConfig::validate() const {
    if (dt <= 0.0) throw validation_error("IntegratorConfig: dt must be positive");
    if (t_end < 0.0) throw validation_error("IntegratorConfig: t_end must be nonnegative");
    if (snapshot_every < 1) throw validation_error("IntegratorConfig: snapshot_every must be >= 1");
}

double Trajectory::max_mass_error() const {
    double m = 0.0;
    for (const auto& d : diagnostics) m = std::max(m, d.mass_error);
    return m;
}

double estimate_dt_max(const State& state, const ModelCoefficients& coeffs, const Grid& grid) {
    (void)grid;
    const double r = coeffs.bounds.r;
    const double b = coeffs.bounds.b;
    const double G = coeffs.bounds.Gamma;
    const double vmax = linf_norm(state.v);
    const double denom = r + b * (1.0 + std::pow(vmax, 1.0 + G)) * std::max(state.S, 1.0);
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / denom;
}

namespace detail {

ImexStepper::ImexStepper(const ModelCoefficients& coeffs, const Grid& grid, Scheme scheme,
                         std::optional<double> pin_S)
    : coeffs_(coeffs),
      grid_(grid),
      scheme_(scheme),
      pin_S_(pin_S),
      diffusion_(diffusion_tridiagonal(coeffs, grid)) {}

void ImexStepper::advance(State& state, double dt) {
    const int n = grid_.n_cells;
    const double S_in = pin_S_ ? *pin_S_ : state.S;

    // Explicit part: E(v, S) = -rho .* v + infection(v, S).
    auto explicit_rhs = [&](std::span<const double> v, double S) {
        std::vector<double> e = infection_term(v, S, coeffs_, grid_);
        for (int i = 0; i < n; ++i) e[i] -= coeffs_.rho[i] * v[i];
        return e;
    };
    auto infection_flux = [&](std::span<const double> v, double S) {
        std::vector<double> inf = infection_term(v, S, coeffs_, grid_);
        return quadrature(inf, grid_);
    };
    auto recovery_flux = [&](std::span<const double> v) {
        std::vector<double> rv(n);
        for (int i = 0; i < n; ++i) rv[i] = coeffs_.rho[i] * v[i];
        return quadrature(rv, grid_);
    };

    std::vector<double> e0 = explicit_rhs(state.v, S_in);
    std::vector<double> v_new;

    if (scheme_ == Scheme::imex_euler) {
        v_new = state.v;
        simd::axpy(dt, e0, v_new);
        const Tridiagonal sys = diffusion_.identity_minus(dt);
        sys.solve(v_new);
        s_indep_ += dt * (recovery_flux(state.v) - infection_flux(state.v, S_in));
    } else {
        // Predictor (IMEX Euler), then trapezoidal corrector: diffusion is
        // averaged implicitly, the explicit part is Heun on the predictor.
        std::vector<double> v_pred = state.v;
        simd::axpy(dt, e0, v_pred);
        Tridiagonal pred_sys = diffusion_.identity_minus(dt);
        pred_sys.solve(v_pred);
        const double S_pred = pin_S_ ? *pin_S_ : state.P_star - quadrature(v_pred, grid_);
        std::vector<double> e1 = explicit_rhs(v_pred, S_pred);

        std::vector<double> rhs = diffusion_.apply(state.v);
        simd::scal(0.5 * dt, rhs);
        simd::axpy(1.0, state.v, rhs);
        simd::axpy(0.5 * dt, e0, rhs);
        simd::axpy(0.5 * dt, e1, rhs);
        Tridiagonal corr_sys = diffusion_.identity_minus(0.5 * dt);
        corr_sys.solve(rhs);
        v_new = std::move(rhs);

        const double g0 = recovery_flux(state.v) - infection_flux(state.v, S_in);
        const double g1 = recovery_flux(v_pred) - infection_flux(v_pred, S_pred);
        s_indep_ += 0.5 * dt * (g0 + g1);
    }

    const double floor = -1e-12 * std::max(1.0, state.P_star);
    double vmin = 0.0;
    for (double vi : v_new) vmin = std::min(vmin, vi);
    if (vmin < floor) {
        throw positivity_error("positivity violation: min v = " + std::to_string(vmin) +
                                   "; reduce dt (see estimate_dt_max)",
                               vmin);
    }

    state.v = std::move(v_new);
    state.S = pin_S_ ? *pin_S_ : state.P_star - quadrature(state.v, grid_);
    state.t += dt;
}

} // namespace detail

State step(const State& state, const ModelCoefficients& coeffs, const Grid& grid,
           const IntegratorConfig& cfg) {
    cfg.validate();
    state.validate(grid);
    detail::ImexStepper stepper(coeffs, grid, cfg.scheme);
    stepper.reset_independent_S(state.S);
    State out = state;
    stepper.advance(out, cfg.dt);
    return out;
}

Trajectory integrate(const State& state0, const ModelCoefficients& coeffs, const Grid& grid,
                     const IntegratorConfig& cfg) {
    cfg.validate();
    state0.validate(grid);
    if (coeffs.bounds.Gamma > 1.0) {
        throw validation_error(
            "integrate requires Gamma <= 1 (global existence regime); use the blow-up "
            "harness for Gamma > 1");
    }

    Trajectory traj;
    traj.times.push_back(state0.t);
    traj.snapshots.push_back(state0);

    detail::ImexStepper stepper(coeffs, grid, cfg.scheme);
    stepper.reset_independent_S(state0.S);

    State state = state0;
    const long n_steps = cfg.t_end > 0.0 ? static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-12)) : 0;
    for (long k = 0; k < n_steps; ++k) {
        const double dt = std::min(cfg.dt, state0.t + cfg.t_end - state.t);
        try {
            stepper.advance(state, dt);
        } catch (const positivity_error& e) {
            throw positivity_error("step " + std::to_string(k + 1) + " at t = " +
                                       std::to_string(state.t) + ": " + e.what(),
                                   e.min_value);
        }
        StepDiagnostics diag;
        diag.t = state.t;
        diag.S = state.S;
        diag.mass_error = state.mass_error(grid);
        diag.min_v = *std::min_element(state.v.begin(), state.v.end());
        diag.linf_v = linf_norm(state.v);
        diag.w11_norm = discrete_w11_norm(state.v, grid);
        diag.s_indep_error = std::abs(state.S - stepper.independent_S());
        traj.worst_min_v = std::min(traj.worst_min_v, diag.min_v);
        traj.diagnostics.push_back(diag);
        if ((k + 1) % cfg.snapshot_every == 0 || k + 1 == n_steps) {
            traj.times.push_back(state.t);
            traj.snapshots.push_back(state);
        }
    }
    if (cfg.positivity_floor_report && traj.worst_min_v < 0.0) {
        std::fprintf(stderr, "positivity floor: min v reached %.3e (tolerated undershoot)\n",
                     traj.worst_min_v);
    }
    return traj;
}

} // namespace strainsis
