#include "strainsis/ode.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "strainsis/errors.hpp"
#include "strainsis/operators.hpp"
#include "strainsis/simd.hpp"

namespace strainsis {

OdeSystem OdeSystem::single_strain(double rho, double beta, double gamma) {
    OdeSystem sys;
    sys.n_strains = 1;
    sys.d_matrix = DenseMatrix(1, 1);
    sys.rho = {rho};
    sys.beta = DenseMatrix(1, 1);
    sys.beta(0, 0) = beta;
    sys.gamma = {gamma};
    sys.validate();
    return sys;
}

void OdeSystem::validate() const {
    if (n_strains < 1) throw validation_error("OdeSystem needs at least one strain");
    if (static_cast<int>(rho.size()) != n_strains || static_cast<int>(gamma.size()) != n_strains ||
        d_matrix.rows() != n_strains || d_matrix.cols() != n_strains ||
        beta.rows() != n_strains || beta.cols() != n_strains) {
        throw validation_error("OdeSystem field shapes do not match n_strains");
    }
    for (double v : rho)
        if (v < 0.0) throw validation_error("OdeSystem: rho must be nonnegative");
    for (double v : gamma)
        if (v < 0.0) throw validation_error("OdeSystem: gamma must be nonnegative");
    for (double v : d_matrix.data())
        if (v < 0.0) throw validation_error("OdeSystem: mutation rates must be nonnegative");
    for (double v : beta.data())
        if (v < 0.0) throw validation_error("OdeSystem: beta must be nonnegative");
}

double OdeState::total_population() const { return simd::sum(I) + S; }

OdeDerivative ode_rhs(const OdeState& state, const OdeSystem& sys) {
    const int n = sys.n_strains;
    assert(static_cast<int>(state.I.size()) == n);
    OdeDerivative out;
    out.dI.assign(n, 0.0);

    // Mutation: sum_j (d_ij I_j - d_ji I_i). The diagonal cancels exactly.
    std::vector<double> inflow = sys.d_matrix.apply(state.I);
    for (int i = 0; i < n; ++i) {
        double out_rate = 0.0;
        for (int j = 0; j < n; ++j) out_rate += sys.d_matrix(j, i);
        out.dI[i] = inflow[i] - out_rate * state.I[i] - sys.rho[i] * state.I[i];
    }

    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) {
        const double a = std::abs(state.I[j]);
        const double g = sys.gamma[j];
        w[j] = (g == 0.0) ? a : (g == 1.0 ? a * a : std::pow(a, 1.0 + g));
    }
    std::vector<double> infection = sys.beta.apply(w);
    double total_infection = 0.0;
    double total_recovery = 0.0;
    for (int i = 0; i < n; ++i) {
        out.dI[i] += state.S * infection[i];
        total_infection += infection[i];
        total_recovery += sys.rho[i] * state.I[i];
    }
    out.dS = total_recovery - state.S * total_infection;
    return out;
}

namespace {

// Packed-vector right-hand side: y = [I_0..I_{n-1}, S].
std::vector<double> packed_rhs(const std::vector<double>& y, const OdeSystem& sys,
                               const std::optional<double>& pin_S) {
    OdeState s;
    s.I.assign(y.begin(), y.end() - 1);
    s.S = pin_S ? *pin_S : y.back();
    OdeDerivative d = ode_rhs(s, sys);
    std::vector<double> out(std::move(d.dI));
    out.push_back(pin_S ? 0.0 : d.dS);
    return out;
}

OdeState unpack(const std::vector<double>& y, double t) {
    OdeState s;
    s.I.assign(y.begin(), y.end() - 1);
    s.S = y.back();
    s.t = t;
    return s;
}

// Dormand-Prince 5(4) tableau.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,     0.0, 500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

} // namespace

OdeTrajectory ode_integrate(const OdeState& state0, const OdeSystem& sys, double dt,
                            double t_end, OdeMethod method, double tol, int store_every,
                            std::optional<double> pin_S) {
    sys.validate();
    if (dt <= 0.0) throw validation_error("ode_integrate: dt must be positive");
    if (t_end < state0.t) throw validation_error("ode_integrate: t_end precedes the initial time");
    for (double v : state0.I)
        if (v < 0.0) throw validation_error("ode_integrate: initial data must be nonnegative");

    OdeTrajectory traj;
    traj.states.push_back(state0);
    const double p0 = state0.total_population();

    std::vector<double> y(state0.I);
    y.push_back(state0.S);
    double t = state0.t;
    long step_index = 0;

    auto record = [&](bool force) {
        if (force || step_index % store_every == 0) traj.states.push_back(unpack(y, t));
        if (!pin_S) {
            const double drift = std::abs(simd::sum(y) - p0);
            traj.max_conservation_drift = std::max(traj.max_conservation_drift, drift);
        }
    };

    if (method == OdeMethod::rk4) {
        while (t < t_end - 1e-15 * std::max(1.0, t_end)) {
            const double step = std::min(dt, t_end - t);
            auto k1 = packed_rhs(y, sys, pin_S);
            std::vector<double> tmp(y);
            simd::axpy(0.5 * step, k1, tmp);
            auto k2 = packed_rhs(tmp, sys, pin_S);
            tmp = y;
            simd::axpy(0.5 * step, k2, tmp);
            auto k3 = packed_rhs(tmp, sys, pin_S);
            tmp = y;
            simd::axpy(step, k3, tmp);
            auto k4 = packed_rhs(tmp, sys, pin_S);
            std::vector<double> y_new(y);
            for (std::size_t i = 0; i < y.size(); ++i) {
                y_new[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if (!std::isfinite(simd::asum(y_new))) {
                traj.aborted = true;
                traj.abort_reason = "non-finite state at t = " + std::to_string(t + step) +
                                    "; dt exceeds the explicit stability limit or the solution "
                                    "blew up";
                return traj;
            }
            y = std::move(y_new);
            t += step;
            ++step_index;
            record(t >= t_end - 1e-15 * std::max(1.0, t_end));
        }
        return traj;
    }

    // Adaptive Dormand-Prince with blow-up-aware controlled abort.
    double h = std::min(dt, t_end - t);
    constexpr double kOverflowGuard = 1e15;
    constexpr long kMaxSteps = 50'000'000;
    std::vector<std::vector<double>> k(7);
    while (t < t_end - 1e-15 * std::max(1.0, t_end)) {
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            traj.aborted = true;
            traj.abort_reason = "step size underflow (blow-up proximity) at t = " + std::to_string(t);
            traj.states.push_back(unpack(y, t));
            return traj;
        }
        if (step_index++ > kMaxSteps) {
            throw convergence_error("ode_integrate: adaptive step budget exhausted", h);
        }
        h = std::min(h, t_end - t);
        k[0] = packed_rhs(y, sys, pin_S);
        for (int s = 1; s < 7; ++s) {
            std::vector<double> tmp(y);
            for (int q = 0; q < s; ++q) {
                if (kA[s][q] != 0.0) simd::axpy(h * kA[s][q], k[q], tmp);
            }
            k[s] = packed_rhs(tmp, sys, pin_S);
        }
        std::vector<double> y5(y), err(y.size(), 0.0);
        for (int s = 0; s < 7; ++s) {
            if (kB5[s] != 0.0) simd::axpy(h * kB5[s], k[s], y5);
            const double db = kB5[s] - kB4[s];
            if (db != 0.0) simd::axpy(h * db, k[s], err);
        }
        double err_ratio = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double scale = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err_ratio = std::max(err_ratio, std::abs(err[i]) / scale);
        }
        if (!std::isfinite(err_ratio)) {
            h *= 0.2; // stage values overflowed; retry on a much smaller step
            continue;
        }
        if (err_ratio <= 1.0) {
            const double magnitude = simd::amax(y5);
            if (!std::isfinite(magnitude)) {
                traj.aborted = true;
                traj.abort_reason = "non-finite state at t = " + std::to_string(t + h);
                return traj;
            }
            t += h;
            y = std::move(y5);
            record(false);
            if (magnitude > kOverflowGuard) {
                traj.aborted = true;
                traj.abort_reason = "state magnitude overflow (blow-up proximity) at t = " + std::to_string(t);
                traj.states.push_back(unpack(y, t));
                return traj;
            }
        }
        const double safety = 0.9 * std::pow(std::max(err_ratio, 1e-10), -0.2);
        h *= std::clamp(safety, 0.2, 5.0);
    }
    traj.states.push_back(unpack(y, t));
    return traj;
}

double critical_population_size(const OdeSystem& sys) {
    if (sys.n_strains != 1) throw validation_error("critical_population_size applies to the single-strain model");
    const double g = sys.gamma[0];
    if (g <= 0.0) throw validation_error("critical_population_size requires gamma > 0");
    const double ratio = sys.rho[0] / sys.beta(0, 0);
    return std::pow(g * ratio, 1.0 / (1.0 + g)) * (1.0 + 1.0 / g);
}

std::vector<std::pair<double, double>> ode_endemic_equilibria(const OdeSystem& sys, double P_star) {
    if (sys.n_strains != 1) throw validation_error("ode_endemic_equilibria applies to the single-strain model");
    const double rho = sys.rho[0];
    const double beta = sys.beta(0, 0);
    const double g = sys.gamma[0];
    if (beta <= 0.0) throw validation_error("ode_endemic_equilibria requires beta > 0");
    const double ratio = rho / beta;

    if (g == 0.0) {
        // Bilinear: equilibria (V, rho/beta) for any V > 0; at fixed total
        // population the one candidate is V = P - rho/beta.
        const double V = P_star - ratio;
        if (V > 0.0) return {{V, ratio}};
        return {};
    }

    // g(V) = V + ratio * V^-gamma is unimodal with minimum at V_bar.
    auto f = [&](double V) { return V + ratio * std::pow(V, -g); };
    auto fprime = [&](double V) { return 1.0 - g * ratio * std::pow(V, -g - 1.0); };
    const double V_bar = std::pow(g * ratio, 1.0 / (1.0 + g));
    const double P_bar = f(V_bar);

    if (P_star < P_bar - 1e-12 * std::max(1.0, P_bar)) return {};
    if (std::abs(P_star - P_bar) <= 1e-12 * std::max(1.0, P_bar)) {
        return {{V_bar, P_star - V_bar}};
    }

    auto refine = [&](double lo, double hi, bool increasing) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool root_to_the_right = increasing ? (f(mid) < P_star) : (f(mid) > P_star);
            if (root_to_the_right) {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
        }
        double V = 0.5 * (lo + hi);
        for (int it = 0; it < 4; ++it) { // Newton polish
            const double slope = fprime(V);
            if (slope == 0.0) break;
            const double next = V - (f(V) - P_star) / slope;
            if (next > 0.0) V = next;
        }
        return V;
    };

    double lo = V_bar;
    while (f(lo) < P_star) lo *= 0.5;
    const double V_left = refine(lo, V_bar, /*increasing=*/false);
    double hi = std::max(P_star, 2.0 * V_bar);
    while (f(hi) < P_star) hi *= 2.0;
    const double V_right = refine(V_bar, hi, /*increasing=*/true);
    return {{V_left, P_star - V_left}, {V_right, P_star - V_right}};
}

std::pair<double, double> ode_endemic_for_S(const OdeSystem& sys, double S) {
    if (sys.n_strains != 1) throw validation_error("ode_endemic_for_S applies to the single-strain model");
    if (S <= 0.0) throw validation_error("ode_endemic_for_S requires S > 0");
    const double g = sys.gamma[0];
    if (g <= 0.0) throw validation_error("ode_endemic_for_S requires gamma > 0");
    const double V = std::pow(sys.rho[0] / (sys.beta(0, 0) * S), 1.0 / g);
    return {V, S};
}

std::optional<double> ode_blowup_exact(double rho, double beta, double p, double v0) {
    if (p <= 1.0) throw validation_error("ode_blowup_exact requires a superlinear exponent p > 1");
    if (v0 <= 0.0 || beta <= 0.0) throw validation_error("ode_blowup_exact requires v0 > 0 and beta > 0");
    if (rho < 0.0) throw validation_error("ode_blowup_exact requires rho >= 0");
    const double growth = beta * std::pow(v0, p - 1.0);
    if (rho == 0.0) return 1.0 / ((p - 1.0) * growth);
    if (growth <= rho) return std::nullopt; // decay regime
    return -std::log(1.0 - rho / growth) / (rho * (p - 1.0));
}

OdeSystem ode_system_from_pde(const ModelCoefficients& coeffs, const Grid& grid) {
    const int n = grid.n_cells;
    OdeSystem sys;
    sys.n_strains = n;
    sys.rho = coeffs.rho;
    sys.gamma = coeffs.gamma;
    sys.d_matrix = DenseMatrix(n, n);
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    for (int i = 0; i + 1 < n; ++i) {
        const double d_face = 0.5 * (coeffs.d[i] + coeffs.d[i + 1]) * inv_h2;
        sys.d_matrix(i, i + 1) = d_face;
        sys.d_matrix(i + 1, i) = d_face;
    }
    sys.beta = DenseMatrix(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            sys.beta(i, j) = coeffs.beta(i, j) * std::pow(grid.h, 1.0 - coeffs.gamma[j]);
        }
    }
    sys.validate();
    return sys;
}

} // namespace strainsis
