#include "strainsis/steady_states.hpp"

#include <algorithm>
#include <cmath>

#include "strainsis/dynamics.hpp"
#include "strainsis/errors.hpp"
#include "strainsis/operators.hpp"
#include "strainsis/simd.hpp"
#include "strainsis/spectral.hpp"

namespace strainsis {

namespace {

constexpr double kSRootTol = 1e-8;
constexpr double kBracketRel = 1e-10;
constexpr double kThetaCap = 1e12;

std::vector<double> stationary_defect(std::span<const double> v, double S,
                                      const ModelCoefficients& coeffs, const Grid& grid) {
    OperatorMatrix diff = assemble_diffusion(coeffs, grid);
    std::vector<double> defect = diff.a.apply(v);
    std::vector<double> inf = infection_term(v, S, coeffs, grid);
    for (int i = 0; i < grid.n_cells; ++i) defect[i] += -coeffs.rho[i] * v[i] + inf[i];
    return defect;
}

/// Newton refinement of the stationary system at fixed S. Reverts when the
/// residual fails to improve (the polish is a best-effort step, correctness
/// rests on the converged construction).
void newton_polish_fixed_S(std::vector<double>& v, double S, const ModelCoefficients& coeffs,
                           const Grid& grid) {
    const int n = grid.n_cells;
    OperatorMatrix diff = assemble_diffusion(coeffs, grid);
    std::vector<double> best = v;
    double best_res = stationary_residual(v, S, coeffs, grid);
    for (int it = 0; it < 5; ++it) {
        DenseMatrix jac = diff.a;
        for (int i = 0; i < n; ++i) {
            jac(i, i) -= coeffs.rho[i];
            for (int j = 0; j < n; ++j) {
                const double g = coeffs.gamma[j];
                const double grad = (g == 0.0) ? 1.0 : (1.0 + g) * std::pow(std::abs(v[j]), g);
                jac(i, j) += S * grid.h * coeffs.beta(i, j) * grad;
            }
        }
        LuFactors lu = lu_factor(std::move(jac));
        if (lu.singular) break;
        std::vector<double> rhs = stationary_defect(v, S, coeffs, grid);
        simd::scal(-1.0, rhs);
        lu.solve(rhs);
        simd::axpy(1.0, rhs, v);
        const double res = stationary_residual(v, S, coeffs, grid);
        if (res < best_res) {
            best = v;
            best_res = res;
        } else {
            break;
        }
    }
    v = best;
}

} // namespace

double stationary_residual(std::span<const double> v, double S,
                           const ModelCoefficients& coeffs, const Grid& grid) {
    return l1_norm(stationary_defect(v, S, coeffs, grid), grid);
}

double balance_residual(std::span<const double> v, double S,
                        const ModelCoefficients& coeffs, const Grid& grid) {
    std::vector<double> recovery(grid.n_cells);
    for (int i = 0; i < grid.n_cells; ++i) recovery[i] = coeffs.rho[i] * v[i];
    std::vector<double> inf = infection_term(v, S, coeffs, grid);
    return std::abs(quadrature(recovery, grid) - quadrature(inf, grid));
}

SteadyState endemic_bilinear(const ModelCoefficients& coeffs, const Grid& grid, double V_star) {
    if (V_star <= 0.0) throw validation_error("endemic_bilinear requires V_star > 0");
    double S_star = find_S_star(coeffs, grid);
    SpectralResult perron = spectral_bound(assemble_psi_R(coeffs, grid, S_star), grid);

    const double mass = quadrature(perron.eigvec, grid);
    if (mass <= 0.0) throw solver_error("Perron eigenvector has nonpositive mass");
    const double kappa = V_star / mass;
    std::vector<double> v(perron.eigvec);
    simd::scal(kappa, v);

    // Bordered Newton polish: unknowns (v, S), constraint quadrature(v) = V*.
    // This tightens both the eigenvector and the bisected S* to roundoff.
    {
        const int n = grid.n_cells;
        OperatorMatrix diff = assemble_diffusion(coeffs, grid);
        std::vector<double> v_try = v;
        double S_try = S_star;
        double best_res = stationary_residual(v, S_star, coeffs, grid);
        for (int it = 0; it < 4; ++it) {
            DenseMatrix jac(n + 1, n + 1);
            std::vector<double> beta_v = coeffs.beta.apply(v_try);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    jac(i, j) = diff.a(i, j) + S_try * grid.h * coeffs.beta(i, j);
                }
                jac(i, i) -= coeffs.rho[i];
                jac(i, n) = grid.h * beta_v[i];
                jac(n, i) = grid.h;
            }
            std::vector<double> rhs = stationary_defect(v_try, S_try, coeffs, grid);
            rhs.push_back(quadrature(v_try, grid) - V_star);
            simd::scal(-1.0, rhs);
            LuFactors lu = lu_factor(std::move(jac));
            if (lu.singular) break;
            lu.solve(rhs);
            for (int i = 0; i < n; ++i) v_try[i] += rhs[i];
            S_try += rhs[n];
            const double res = stationary_residual(v_try, S_try, coeffs, grid);
            if (res < best_res) {
                best_res = res;
                v = v_try;
                S_star = S_try;
            } else {
                break;
            }
        }
    }

    SteadyState out;
    out.v_star = std::move(v);
    out.S_star = S_star;
    out.solver = SteadySolver::bilinear;
    out.kappa = kappa;
    out.iterations = perron.iterations;
    out.residual_pde = stationary_residual(out.v_star, S_star, coeffs, grid);
    out.residual_balance = balance_residual(out.v_star, S_star, coeffs, grid);
    const double tol = 1e-7 * (1.0 + V_star);
    if (out.residual_pde > tol || out.residual_balance > tol) {
        throw solver_error("bilinear steady state failed its residual check: pde " +
                           std::to_string(out.residual_pde) + ", balance " +
                           std::to_string(out.residual_balance));
    }
    return out;
}

PhiResult phi_R(std::span<const double> c, const ModelCoefficients& coeffs, const Grid& grid,
                double R, std::span<const double> eigvec_hint) {
    if (R <= 0.0) throw validation_error("phi_R requires R > 0");
    const double c_norm = discrete_w11_norm(c, grid);
    if (!(c_norm > 0.0)) throw validation_error("phi_R: direction c must be nonzero");
    if (c_norm > 1.0 + 1e-12) {
        throw validation_error("phi_R: direction c must have W11 norm at most 1");
    }
    for (double ci : c)
        if (ci < 0.0) throw validation_error("phi_R: direction c must be nonnegative");
    if (coeffs.beta_min <= 0.0) {
        throw validation_error("phi_R requires a strictly positive beta kernel");
    }

    std::vector<double> warm(eigvec_hint.begin(), eigvec_hint.end());
    auto solve_at = [&](double theta, bool sign_only) {
        std::vector<double> u(c.begin(), c.end());
        simd::scal(theta, u);
        PowerOptions opts;
        opts.warm_start = warm;
        if (sign_only) opts.sign_certainty_factor = 100.0;
        SpectralResult r = spectral_bound(assemble_psi_uR(coeffs, grid, u, R), grid, opts);
        warm = r.eigvec;
        return r;
    };

    if (coeffs.gamma_is_zero()) {
        // u^0 == 1 removes the ray dependence entirely.
        SpectralResult r = solve_at(1.0, false);
        return {std::move(r.eigvec), 0.0};
    }

    // Bracket the level-set crossing: seed from the a priori bound, double
    // until the spectral bound turns positive.
    double theta_hi = (coeffs.bounds.r + 1.0) / (R * f_gamma_min(coeffs.bounds.Gamma) * coeffs.beta_min);
    double s_hi = solve_at(theta_hi, true).s;
    while (s_hi <= 0.0) {
        theta_hi *= 2.0;
        if (theta_hi > kThetaCap) {
            throw convergence_error(
                "spectral bound does not cross zero along the ray (gamma outside the "
                "construction's scope)",
                s_hi);
        }
        s_hi = solve_at(theta_hi, true).s;
    }

    double lo = 0.0, hi = theta_hi;
    const double width_target = kBracketRel * theta_hi;
    while (hi - lo > width_target) {
        const double mid = 0.5 * (lo + hi);
        if (solve_at(mid, true).s < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double theta_star = 0.5 * (lo + hi);
    SpectralResult root = solve_at(theta_star, false);
    if (std::abs(root.s) > kSRootTol) {
        throw solver_error("phi_R: |s(theta*)| = " + std::to_string(std::abs(root.s)) +
                           " exceeds the root tolerance");
    }
    return {std::move(root.eigvec), theta_star};
}

SteadyState endemic_fixed_point(const ModelCoefficients& coeffs, const Grid& grid, double R,
                                const FixedPointOptions& opts) {
    if (R <= 0.0) throw validation_error("endemic_fixed_point requires R > 0");
    if (quadrature(coeffs.rho, grid) <= 0.0) {
        throw validation_error("theorem hypothesis violated: rho must not be identically zero");
    }

    if (coeffs.gamma_is_zero()) {
        // gamma == 0 admits endemic states only at the spectral root S*;
        // delegate the consistency check.
        SpectralResult r = spectral_bound(assemble_psi_R(coeffs, grid, R), grid);
        if (std::abs(r.s) > kSRootTol) {
            throw validation_error("gamma == 0: s(Psi_R) = " + std::to_string(r.s) +
                                   " is nonzero at this R; endemic states exist only at R = S* "
                                   "(use endemic_bilinear)");
        }
        SteadyState out;
        out.v_star = std::move(r.eigvec);
        out.S_star = R;
        out.solver = SteadySolver::fixed_point;
        out.kappa = 1.0;
        out.residual_pde = stationary_residual(out.v_star, R, coeffs, grid);
        out.residual_balance = balance_residual(out.v_star, R, coeffs, grid);
        return out;
    }

    if (coeffs.bounds.Gamma > 1.0) {
        throw validation_error(
            "endemic_fixed_point covers gamma in (0,1]; no construction is available for "
            "Gamma > 1");
    }
    bool gamma_identically_one = true;
    for (double g : coeffs.gamma) gamma_identically_one &= (g == 1.0);

    const int n = grid.n_cells;
    std::vector<double> c;
    if (opts.c0) {
        c = *opts.c0;
        const double norm = discrete_w11_norm(c, grid);
        if (norm <= 0.0) throw validation_error("endemic_fixed_point: zero seed direction");
        simd::scal(1.0 / norm, c);
    } else {
        c.assign(n, 1.0); // constant seed, W11 norm 1
    }

    std::vector<double> warm;
    double theta_star = 0.0;
    int iterations = 0;
    double increment = 0.0;
    bool converged = false;
    for (int k = 1; k <= opts.max_iterations; ++k) {
        PhiResult phi = phi_R(c, coeffs, grid, R, warm);
        warm = phi.direction;
        theta_star = phi.theta_star;
        std::vector<double> next(n);
        for (int i = 0; i < n; ++i) {
            next[i] = (1.0 - opts.damping) * c[i] + opts.damping * phi.direction[i];
        }
        std::vector<double> diff(n);
        for (int i = 0; i < n; ++i) diff[i] = next[i] - c[i];
        increment = discrete_w11_norm(diff, grid);
        c = std::move(next);
        iterations = k;
        if (increment <= opts.tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw convergence_error("fixed-point iteration did not converge in " +
                                    std::to_string(opts.max_iterations) +
                                    " steps (last W11 increment " + std::to_string(increment) +
                                    "); existence theory does not promise Picard convergence -- "
                                    "try damping",
                                increment);
    }

    SteadyState out;
    out.v_star.resize(n);
    for (int i = 0; i < n; ++i) out.v_star[i] = theta_star * c[i];
    out.S_star = R;
    out.solver = SteadySolver::fixed_point;
    out.kappa = theta_star;
    out.iterations = iterations;
    out.exploratory = !gamma_identically_one;

    newton_polish_fixed_S(out.v_star, R, coeffs, grid);
    out.residual_pde = stationary_residual(out.v_star, R, coeffs, grid);
    out.residual_balance = balance_residual(out.v_star, R, coeffs, grid);
    if (out.residual_pde > 1e-7 || out.residual_balance > 1e-7) {
        throw solver_error("fixed-point steady state failed its residual check: pde " +
                           std::to_string(out.residual_pde) + ", balance " +
                           std::to_string(out.residual_balance));
    }
    return out;
}

SteadyStateCheck verify_steady_state(const SteadyState& ss, const ModelCoefficients& coeffs,
                                     const Grid& grid, double residual_tol, double drift_tol) {
    SteadyStateCheck check;
    check.residual_pde = stationary_residual(ss.v_star, ss.S_star, coeffs, grid);
    check.residual_balance = balance_residual(ss.v_star, ss.S_star, coeffs, grid);
    check.pde_ok = check.residual_pde <= residual_tol;
    check.balance_ok = check.residual_balance <= residual_tol;

    std::vector<double> v0(ss.v_star);
    for (double& vi : v0) vi = std::max(vi, 0.0);
    State s0 = State::from_initial(std::move(v0), ss.S_star, grid);
    IntegratorConfig cfg{.dt = 1e-3, .t_end = 1.0, .scheme = Scheme::imex_cn, .snapshot_every = 1 << 30};
    Trajectory traj = integrate(s0, coeffs, grid, cfg);
    const State& fin = traj.final_state();
    std::vector<double> dv(grid.n_cells);
    for (int i = 0; i < grid.n_cells; ++i) dv[i] = fin.v[i] - ss.v_star[i];
    check.drift_l1 = l1_norm(dv, grid) + std::abs(fin.S - ss.S_star);
    check.drift_ok = check.drift_l1 <= drift_tol;
    return check;
}

} // namespace strainsis
