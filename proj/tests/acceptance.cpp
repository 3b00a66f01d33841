// Acceptance suite: one check per shipped criterion, each at its stated
// tolerance, printing PASS/FAIL per criterion. Exit code is the number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "strainsis/blowup.hpp"
#include "strainsis/dynamics.hpp"
#include "strainsis/ode.hpp"
#include "strainsis/operators.hpp"
#include "strainsis/scenario.hpp"
#include "strainsis/spectral.hpp"
#include "strainsis/stability.hpp"
#include "strainsis/steady_states.hpp"
#include "support.hpp"

using namespace strainsis;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct check_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw check_failure(what);
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", x);
    return buf;
}

ModelCoefficients constant_coeffs(const Grid& g, double d, double rho, double beta, double gamma) {
    CoefficientSpec spec;
    spec.d = ConstantFn{d};
    spec.rho = ConstantFn{rho};
    spec.beta = ConstantKernel{beta};
    spec.gamma = ConstantFn{gamma};
    return sample_coefficients(spec, g);
}

/// Smooth amplitude-0.2 perturbation of the quadratic constants.
ModelCoefficients perturbed_quadratic(const Grid& g) {
    CoefficientSpec spec;
    spec.d = CosineFn{1.0, 0.2, 1};
    spec.rho = CosineFn{1.0, -0.2, 2};
    SeparableKernel kernel;
    kernel.fx = CosineFn{2.0, 0.2, 1};
    kernel.fy = CosineFn{1.0, 0.2, 2};
    spec.beta = kernel;
    spec.gamma = ConstantFn{1.0};
    return sample_coefficients(spec, g);
}

double ode_reference_terminal(double rho, double beta, double gamma, double v0, double S0,
                              double t_end) {
    OdeSystem sys = OdeSystem::single_strain(rho, beta, gamma);
    OdeState s{{v0}, S0, 0.0};
    auto traj = ode_integrate(s, sys, 1e-3, t_end, OdeMethod::adaptive, 1e-12, 1 << 30);
    return traj.back().I[0];
}

// --- criterion 1 -----------------------------------------------------------

void criterion_conservation() {
    for (const Scenario& preset : preset_catalog()) {
        Grid grid = Grid::uniform(128);
        ModelCoefficients coeffs = sample_coefficients(preset.coefficients, grid);
        State s0 = State::from_initial(sample_initial(preset, grid), preset.initial.S0, grid);

        const auto start = std::chrono::steady_clock::now();
        double worst = 0.0;
        if (coeffs.bounds.Gamma <= 1.0) {
            IntegratorConfig cfg = preset.integrator;
            cfg.t_end = 5.0;
            cfg.snapshot_every = 1 << 30;
            Trajectory traj = integrate(s0, coeffs, grid, cfg);
            worst = traj.max_mass_error();
        } else {
            // Gamma > 1 runs through the harness entry point by design.
            BlowupConfig cfg;
            cfg.dt_base = preset.run.value("dt_base", preset.integrator.dt);
            cfg.t_max = 0.05;
            cfg.max_steps = 100'000;
            cfg.record_every = 50;
            BlowupReport rep = blowup_run(s0, coeffs, grid, cfg);
            worst = rep.max_mass_defect;
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        require(worst <= 1e-12 * s0.P_star,
                preset.name + ": mass error " + num(worst) + " > 1e-12 P*");
        require(seconds < 10.0, preset.name + ": runtime " + num(seconds) + " s >= 10 s");
    }
}

// --- criterion 2 -----------------------------------------------------------

void criterion_pde_ode_collapse() {
    Grid grid = Grid::uniform(32);
    auto coeffs = constant_coeffs(grid, 1.0, 1.0, 2.0, 1.0);
    State s0 = State::from_initial(std::vector<double>(32, 0.8), 0.2, grid);
    const double t_end = 5.0;
    const double ref = ode_reference_terminal(1.0, 2.0, 1.0, 0.8, 0.2, t_end);

    auto terminal_error = [&](double dt) {
        IntegratorConfig cfg{.dt = dt, .t_end = t_end, .scheme = Scheme::imex_cn,
                             .snapshot_every = 1 << 30};
        Trajectory traj = integrate(s0, coeffs, grid, cfg);
        double err = 0.0;
        for (double v : traj.final_state().v) err = std::max(err, std::abs(v - ref));
        return err;
    };

    const double e1 = terminal_error(1e-3);
    require(e1 <= 1e-4, "terminal linf error " + num(e1) + " > 1e-4 at dt=1e-3");
    const double e2 = terminal_error(5e-4);
    const double order = std::log2(e1 / e2);
    require(order >= 1.8 && order <= 2.2,
            "observed order " + num(order) + " outside [1.8, 2.2]");
}

// --- criterion 3 -----------------------------------------------------------

void criterion_spectral_oracle() {
    for (int n : {32, 128}) {
        Grid grid = Grid::uniform(n);
        auto coeffs = constant_coeffs(grid, 1.0, 1.0, 2.0, 0.0);
        for (double R : {0.0, 0.1, 0.5, 1.0, 5.0}) {
            const double s = spectral_bound(assemble_psi_R(coeffs, grid, R), grid).s;
            const double exact = R * 2.0 - 1.0;
            require(std::abs(s - exact) <= 1e-8,
                    "n=" + std::to_string(n) + " R=" + num(R) + ": |s - (Rb-r)| = " +
                        num(std::abs(s - exact)));
        }
    }
    std::mt19937_64 rng(1234);
    Grid grid = Grid::uniform(32);
    std::uniform_real_distribution<double> rdist(0.0, 2.0);
    for (int draw = 0; draw < 20; ++draw) {
        auto coeffs = sample_coefficients(testsupport::random_smooth_coefficients(rng, 0.0), grid);
        double R1 = rdist(rng), R2 = rdist(rng);
        if (R1 > R2) std::swap(R1, R2);
        if (R2 - R1 < 1e-2) R2 += 0.25;
        const double s1 = spectral_bound(assemble_psi_R(coeffs, grid, R1), grid).s;
        const double s2 = spectral_bound(assemble_psi_R(coeffs, grid, R2), grid).s;
        require(s1 < s2, "monotonicity failed on draw " + std::to_string(draw));
    }
}

// --- criterion 4 -----------------------------------------------------------

void criterion_bilinear_endemic() {
    Grid grid = Grid::uniform(64);
    auto coeffs = constant_coeffs(grid, 1.0, 1.0, 2.0, 0.0);
    for (double V : {1.0, 3.0, 7.0}) {
        SteadyState ss = endemic_bilinear(coeffs, grid, V);
        require(std::abs(ss.S_star - 0.5) <= 1e-8,
                "S* = " + num(ss.S_star) + " not within 1e-8 of 0.5");
        for (double v : ss.v_star) {
            require(std::abs(v - V) <= 1e-7 * V, "v* deviates from the constant V*");
        }
        require(ss.residual_pde <= 1e-8, "residual_pde " + num(ss.residual_pde) + " > 1e-8");
        require(ss.residual_balance <= 1e-10,
                "residual_balance " + num(ss.residual_balance) + " > 1e-10");
    }
    // Mesh doubling: with constants S* carries no h-dependence, and on a
    // smooth perturbation the increments contract like h^2.
    std::vector<double> s_const;
    for (int n : {32, 64, 128}) {
        Grid g = Grid::uniform(n);
        s_const.push_back(find_S_star(constant_coeffs(g, 1.0, 1.0, 2.0, 0.0), g));
    }
    require(std::abs(s_const[1] - s_const[0]) <= 1e-8 &&
                std::abs(s_const[2] - s_const[1]) <= 1e-8,
            "constant-coefficient S* moved under mesh doubling");
    std::mt19937_64 rng(77);
    auto spec = testsupport::random_smooth_coefficients(rng, 0.0);
    std::vector<double> s_smooth;
    for (int n : {32, 64, 128}) {
        Grid g = Grid::uniform(n);
        s_smooth.push_back(find_S_star(sample_coefficients(spec, g), g));
    }
    const double ratio = std::abs(s_smooth[2] - s_smooth[1]) /
                         std::max(std::abs(s_smooth[1] - s_smooth[0]), 1e-300);
    require(ratio > 0.05 && ratio < 0.6,
            "smooth S* increments do not contract like h^2 (ratio " + num(ratio) + ")");
}

// --- criterion 5 -----------------------------------------------------------

void criterion_quadratic_endemic() {
    Grid grid = Grid::uniform(64);
    auto coeffs = constant_coeffs(grid, 1.0, 1.0, 2.0, 1.0);
    for (double R : {0.5, 1.0, 2.0}) {
        SteadyState ss = endemic_fixed_point(coeffs, grid, R);
        const double expected = 1.0 / (2.0 * R);
        for (double v : ss.v_star) {
            require(std::abs(v - expected) <= 1e-7,
                    "R=" + num(R) + ": v* off the closed form by " +
                        num(std::abs(v - expected)));
        }
        require(ss.iterations <= 3, "R=" + num(R) + ": fixed point took " +
                                        std::to_string(ss.iterations) + " > 3 iterations");
    }

    Grid g48 = Grid::uniform(48);
    auto pert = perturbed_quadratic(g48);
    SteadyState ss = endemic_fixed_point(pert, g48, 1.0);
    require(ss.residual_pde <= 1e-7,
            "perturbed run residual_pde " + num(ss.residual_pde) + " > 1e-7");
    const double bound = theta_star_bound(pert, g48, 1.0);
    require(l1_norm(ss.v_star, g48) <= bound,
            "||v*||_1 = " + num(l1_norm(ss.v_star, g48)) + " exceeds the a priori bound " +
                num(bound));
}

// --- criterion 6 -----------------------------------------------------------

void criterion_dynamic_consistency() {
    Grid grid = Grid::uniform(64);
    auto bilinear = constant_coeffs(grid, 1.0, 1.0, 2.0, 0.0);
    auto quadratic = constant_coeffs(grid, 1.0, 1.0, 2.0, 1.0);
    Grid g48 = Grid::uniform(48);
    auto pert = perturbed_quadratic(g48);

    struct Case {
        SteadyState ss;
        const ModelCoefficients* coeffs;
        const Grid* grid;
        std::string name;
    };
    std::vector<Case> cases;
    cases.push_back({endemic_bilinear(bilinear, grid, 3.0), &bilinear, &grid, "bilinear V*=3"});
    cases.push_back({endemic_fixed_point(quadratic, grid, 1.0), &quadratic, &grid, "quadratic R=1"});
    cases.push_back({endemic_fixed_point(pert, g48, 1.0), &pert, &g48, "perturbed R=1"});
    for (const Case& c : cases) {
        SteadyStateCheck check = verify_steady_state(c.ss, *c.coeffs, *c.grid);
        require(check.drift_l1 <= 1e-6,
                c.name + ": drift " + num(check.drift_l1) + " > 1e-6 over t=1");
    }
}

// --- criterion 7 -----------------------------------------------------------

void criterion_disease_free_stability() {
    const int n = 128;
    Grid grid = Grid::uniform(n);
    auto coeffs = constant_coeffs(grid, 1.0, 1.0, 2.0, 1.0);
    LinearizationMatrix lin = assemble_linearization_disease_free(1.0, coeffs, grid);

    std::vector<double> e_last(n + 1, 0.0);
    e_last.back() = 1.0;
    std::vector<double> image = lin.a.apply(e_last);
    double conservation_residual = std::abs(image.back());
    for (int i = 0; i < n; ++i) conservation_residual += grid.h * std::abs(image[i]);
    require(conservation_residual <= 1e-10,
            "||L (0,1)|| = " + num(conservation_residual) + " > 1e-10");

    DenseMatrix reduced = mass_zero_projection(lin, grid);
    AbscissaOptions opts;
    opts.seed = 2024;
    opts.perron_crosscheck = false;
    AbscissaReport rep = spectral_abscissa(reduced, opts);
    require(std::abs(rep.abscissa - (-1.0)) <= 1e-3,
            "mass-zero abscissa " + num(rep.abscissa) + " not within 1e-3 of -1");

    for (int k : {0, 1}) {
        std::vector<double> mode(n);
        for (int i = 0; i < n; ++i) mode[i] = std::cos(k * kPi * grid.centers[i]);
        const double rate = fitted_mode_rate(reduced, mode, 1.0, 4000);
        const double analytic = -1.0 - k * k * kPi * kPi;
        require(std::abs(rate - analytic) <= 10.0 * grid.h * grid.h,
                "mode k=" + std::to_string(k) + " rate " + num(rate) + " vs " + num(analytic) +
                    " differs by " + num(std::abs(rate - analytic)) + " > 10 h^2");
    }
}

// --- criterion 8 -----------------------------------------------------------

void criterion_ode_equilibria() {
    OdeSystem unit = OdeSystem::single_strain(1.0, 1.0, 1.0);
    require(std::abs(critical_population_size(unit) - 2.0) <= 1e-12, "P-bar != 2");

    auto two = ode_endemic_equilibria(unit, 2.5);
    require(two.size() == 2, "P=2.5 should give exactly two equilibria");
    require(std::abs(two[0].first - 0.5) <= 1e-10 && std::abs(two[1].first - 2.0) <= 1e-10,
            "equilibria {V=0.5, V=2} missed at 1e-10");
    require(ode_endemic_equilibria(unit, 1.5).empty(), "P=1.5 should give no equilibria");

    // PDE match at the shared constants r=1, b=2, gamma=1.
    OdeSystem shared = OdeSystem::single_strain(1.0, 2.0, 1.0);
    Grid grid = Grid::uniform(48);
    auto coeffs = constant_coeffs(grid, 1.0, 1.0, 2.0, 1.0);
    for (double S : {0.5, 1.0, 2.0}) {
        const double V_ode = ode_endemic_for_S(shared, S).first;
        SteadyState ss = endemic_fixed_point(coeffs, grid, S);
        for (double v : ss.v_star) {
            require(std::abs(v - V_ode) <= 1e-7,
                    "S=" + num(S) + ": PDE state differs from the ODE closed form by " +
                        num(std::abs(v - V_ode)));
        }
    }
}

// --- criterion 9 -----------------------------------------------------------

void criterion_blowup_baseline() {
    auto T = ode_blowup_exact(0.0, 1.0, 2.0, 1.0);
    require(T.has_value() && *T == 1.0, "ode_blowup_exact(0,1,2,1) must be exactly 1");

    OdeSystem bern = OdeSystem::single_strain(0.0, 1.0, 1.0);
    OdeState s0{{1.0}, 1.0, 0.0};
    auto traj = ode_integrate(s0, bern, 1e-3, 10.0, OdeMethod::adaptive, 1e-10, 1 << 30,
                              /*pin_S=*/1.0);
    require(traj.aborted, "adaptive integration must abort near blow-up");
    require(std::abs(traj.back().t - 1.0) <= 1e-3,
            "abort time " + num(traj.back().t) + " not within 1e-3 of T=1");

    for (const Scenario& preset : preset_catalog()) {
        Grid probe_grid = Grid::uniform(16);
        if (sample_coefficients(preset.coefficients, probe_grid).bounds.Gamma > 1.0) continue;
        for (int n : {32, 64, 128}) {
            Grid grid = Grid::uniform(n);
            auto coeffs = sample_coefficients(preset.coefficients, grid);
            State s0n = State::from_initial(sample_initial(preset, grid), preset.initial.S0, grid);
            BlowupConfig cfg;
            cfg.dt_base = 1e-3;
            cfg.t_max = 1.0;
            cfg.record_every = 100;
            BlowupReport rep = blowup_run(s0n, coeffs, grid, cfg);
            require(!rep.blowup_suspected,
                    preset.name + " flagged blow-up at n=" + std::to_string(n));
        }
    }
}

// --- criterion 10 ----------------------------------------------------------

void criterion_discretization_accuracy() {
    std::vector<double> errs;
    for (int n : {32, 64, 128}) {
        Grid grid = Grid::uniform(n);
        auto coeffs = constant_coeffs(grid, 1.0, 0.0, 0.0, 0.0);
        OperatorMatrix diff = assemble_diffusion(coeffs, grid);
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = std::cos(kPi * grid.centers[i]);
        auto av = diff.a.apply(v);
        double err = 0.0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(av[i] + kPi * kPi * v[i]));
        errs.push_back(err);
    }
    for (std::size_t k = 1; k < errs.size(); ++k) {
        const double order = std::log2(errs[k - 1] / errs[k]);
        require(order >= 1.8 && order <= 2.2, "diffusion order " + num(order) + " off 2");
    }

    Grid g = Grid::uniform(100);
    std::vector<double> ones(100, 1.0), zeros(100, 0.0), lin(g.centers);
    require(std::abs(quadrature(ones, g) - 1.0) <= 1e-12, "quadrature(1) != 1");
    require(quadrature(zeros, g) == 0.0, "quadrature(0) != 0");
    require(std::abs(quadrature(lin, g) - 0.5) <= 1e-12, "quadrature(x) != 1/2");
    require(std::abs(discrete_w11_norm(lin, g) - 1.5) <= 1e-12, "W11(x) != 3/2");
    std::vector<double> c(100, 2.5);
    require(std::abs(discrete_w11_norm(c, g) - 2.5) <= 1e-12, "W11(const) != const");
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void()> check;
    };
    const std::vector<Criterion> criteria = {
        {"1  conservation across the preset suite", criterion_conservation},
        {"2  PDE-ODE collapse with order-2 convergence", criterion_pde_ode_collapse},
        {"3  spectral oracle s = Rb - r and monotonicity", criterion_spectral_oracle},
        {"4  bilinear endemic states", criterion_bilinear_endemic},
        {"5  quadratic endemic states", criterion_quadratic_endemic},
        {"6  endemic states are dynamically stationary", criterion_dynamic_consistency},
        {"7  disease-free stability indicators", criterion_disease_free_stability},
        {"8  ODE equilibrium structure and PDE match", criterion_ode_equilibria},
        {"9  blow-up baseline and Gamma <= 1 controls", criterion_blowup_baseline},
        {"10 discretization accuracy", criterion_discretization_accuracy},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        try {
            c.check();
            std::printf("[PASS] criterion %s\n", c.name);
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] criterion %s: %s\n", c.name, e.what());
        }
        std::fflush(stdout);
    }
    if (failures == 0) {
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    } else {
        std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
    }
    return failures;
}
