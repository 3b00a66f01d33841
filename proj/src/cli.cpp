#include "strainsis/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "strainsis/blowup.hpp"
#include "strainsis/dynamics.hpp"
#include "strainsis/errors.hpp"
#include "strainsis/io.hpp"
#include "strainsis/ode.hpp"
#include "strainsis/scenario.hpp"
#include "strainsis/simd.hpp"
#include "strainsis/spectral.hpp"
#include "strainsis/stability.hpp"
#include "strainsis/steady_states.hpp"

namespace strainsis::cli {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string scenario_path;
    std::string preset_name;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> n_cells;
    std::optional<double> dt;
    std::optional<double> t_end;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--scenario", args.scenario_path, "scenario file (.toml or .json)");
    cmd->add_option("--preset", args.preset_name, "named scenario from the preset catalog");
    cmd->add_option("--out-dir", args.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", args.seed, "override the scenario seed");
    cmd->add_option("--n-cells", args.n_cells, "override the grid resolution");
    cmd->add_option("--dt", args.dt, "override the time step");
    cmd->add_option("--t-end", args.t_end, "override the final time");
}

Scenario resolve_scenario(const CommonArgs& args) {
    Scenario sc;
    if (!args.preset_name.empty() && !args.scenario_path.empty()) {
        throw validation_error("give either --scenario or --preset, not both");
    }
    if (!args.preset_name.empty()) {
        const Scenario* preset = find_preset(args.preset_name);
        if (!preset) {
            std::string known;
            for (const Scenario& p : preset_catalog()) known += " " + p.name;
            throw validation_error("unknown preset '" + args.preset_name + "'; available:" + known);
        }
        sc = *preset;
    } else if (!args.scenario_path.empty()) {
        sc = load_scenario(args.scenario_path);
    } else {
        throw validation_error("a scenario is required: pass --scenario <file> or --preset <name>");
    }
    if (args.seed) sc.seed = *args.seed;
    if (args.n_cells) sc.n_cells = *args.n_cells;
    if (args.dt) sc.integrator.dt = *args.dt;
    if (args.t_end) sc.integrator.t_end = *args.t_end;
    return sc;
}

fs::path ensure_out_dir(const CommonArgs& args) {
    fs::path dir(args.out_dir);
    fs::create_directories(dir);
    return dir;
}

nlohmann::json scenario_echo(const Scenario& sc, const Grid& grid,
                             const ModelCoefficients& coeffs, const State& s0) {
    nlohmann::json j;
    j["scenario"] = scenario_to_json(sc);
    j["P_star"] = s0.P_star;
    j["bounds"] = {{"b", coeffs.bounds.b}, {"d0", coeffs.bounds.d0},   {"d1", coeffs.bounds.d1},
                   {"r", coeffs.bounds.r}, {"Gamma", coeffs.bounds.Gamma}};
    j["beta_min"] = coeffs.beta_min;
    j["simd"] = simd::isa_name(simd::active_isa());
    (void)grid;
    return j;
}

int cmd_validate(const CommonArgs& args) {
    Scenario sc = resolve_scenario(args);
    Grid grid = sc.n_cells == 1 ? Grid::degenerate_single_cell() : Grid::uniform(sc.n_cells);
    ModelCoefficients coeffs = sample_coefficients(sc.coefficients, grid);
    State s0 = State::from_initial(sample_initial(sc, grid), sc.initial.S0, grid);
    nlohmann::json j = scenario_echo(sc, grid, coeffs, s0);
    j["valid"] = true;
    write_json_file(ensure_out_dir(args) / "validation.json", j);
    std::cout << "scenario '" << sc.name << "' is valid; P_star = " << format17(s0.P_star)
              << "\n";
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    Scenario sc = resolve_scenario(args);
    Grid grid = Grid::uniform(sc.n_cells);
    ModelCoefficients coeffs = sample_coefficients(sc.coefficients, grid);
    State s0 = State::from_initial(sample_initial(sc, grid), sc.initial.S0, grid);
    Trajectory traj = integrate(s0, coeffs, grid, sc.integrator);

    const fs::path dir = ensure_out_dir(args);
    {
        const std::string header[] = {"t", "x", "v"};
        CsvWriter fields(dir / "fields.csv", header);
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
            const State& s = traj.snapshots[k];
            for (int i = 0; i < grid.n_cells; ++i) {
                const double row[] = {traj.times[k], grid.centers[i], s.v[i]};
                fields.row(row);
            }
        }
    }
    {
        const std::string header[] = {"t", "S", "mass_error", "min_v", "linf_v", "w11_norm"};
        CsvWriter series(dir / "series.csv", header);
        for (const StepDiagnostics& d : traj.diagnostics) {
            const double row[] = {d.t, d.S, d.mass_error, d.min_v, d.linf_v, d.w11_norm};
            series.row(row);
        }
    }
    nlohmann::json j = scenario_echo(sc, grid, coeffs, s0);
    j["max_mass_error"] = traj.max_mass_error();
    j["steps"] = traj.diagnostics.size();
    j["t_final"] = traj.final_state().t;
    write_json_file(dir / "summary.json", j);
    std::cout << "simulate: " << traj.diagnostics.size() << " steps, max mass error "
              << format17(traj.max_mass_error()) << "\n";
    return 0;
}

int cmd_steady_state(const CommonArgs& args, const std::string& gamma_mode,
                     std::optional<double> R_flag, std::optional<double> V_flag) {
    Scenario sc = resolve_scenario(args);
    Grid grid = Grid::uniform(sc.n_cells);
    ModelCoefficients coeffs = sample_coefficients(sc.coefficients, grid);

    SteadyState ss;
    if (gamma_mode == "bilinear") {
        double V_star = V_flag ? *V_flag : sc.run.value("V_star", 1.0);
        ss = endemic_bilinear(coeffs, grid, V_star);
    } else if (gamma_mode == "fixed-point") {
        double R = R_flag ? *R_flag : sc.run.value("R", 1.0);
        ss = endemic_fixed_point(coeffs, grid, R);
    } else {
        throw validation_error("--gamma-mode must be 'bilinear' or 'fixed-point'");
    }
    SteadyStateCheck check = verify_steady_state(ss, coeffs, grid);

    const fs::path dir = ensure_out_dir(args);
    {
        const std::string header[] = {"x", "v_star"};
        CsvWriter csv(dir / "v_star.csv", header);
        for (int i = 0; i < grid.n_cells; ++i) {
            const double row[] = {grid.centers[i], ss.v_star[i]};
            csv.row(row);
        }
    }
    nlohmann::json j;
    j["S_star"] = ss.S_star;
    j["theta_star"] = ss.kappa;
    j["residuals"] = {{"pde", ss.residual_pde}, {"balance", ss.residual_balance}};
    j["iterations"] = ss.iterations;
    j["solver"] = ss.solver == SteadySolver::bilinear ? "bilinear" : "fixed_point";
    j["exploratory"] = ss.exploratory;
    j["V_star"] = quadrature(ss.v_star, grid);
    j["verify"] = {{"residual_pde", check.residual_pde},
                   {"residual_balance", check.residual_balance},
                   {"drift_l1", check.drift_l1},
                   {"passed", check.passed()}};
    write_json_file(dir / "summary.json", j);
    std::cout << "steady-state: S* = " << format17(ss.S_star) << ", residual_pde = "
              << format17(ss.residual_pde) << (check.passed() ? " (verified)" : " (CHECK FAILED)")
              << "\n";
    return check.passed() ? 0 : 2;
}

int cmd_spectral_scan(const CommonArgs& args, const std::string& axis, double lo, double hi,
                      int count, std::optional<double> R_flag) {
    if (count < 1) throw validation_error("--count must be at least 1");
    if (hi < lo) throw validation_error("scan range must have hi >= lo");
    Scenario sc = resolve_scenario(args);
    Grid grid = Grid::uniform(sc.n_cells);
    ModelCoefficients coeffs = sample_coefficients(sc.coefficients, grid);

    const fs::path dir = ensure_out_dir(args);
    const std::string header[] = {axis, "s", "iterations", "residual"};
    CsvWriter csv(dir / "scan.csv", header);

    std::vector<double> warm;
    for (int k = 0; k < count; ++k) {
        const double value = count == 1 ? lo : lo + (hi - lo) * k / (count - 1);
        PowerOptions opts;
        opts.warm_start = warm;
        SpectralResult res;
        if (axis == "R") {
            res = spectral_bound(assemble_psi_R(coeffs, grid, value), grid, opts);
        } else if (axis == "theta") {
            const double R = R_flag ? *R_flag : sc.run.value("R", 1.0);
            std::vector<double> u(grid.n_cells, value);
            res = spectral_bound(assemble_psi_uR(coeffs, grid, u, R), grid, opts);
        } else {
            throw validation_error("--axis must be 'R' or 'theta'");
        }
        warm = res.eigvec;
        const double row[] = {value, res.s, static_cast<double>(res.iterations), res.residual};
        csv.row(row);
    }
    std::cout << "spectral-scan: " << count << " points along " << axis << " in ["
              << format17(lo) << ", " << format17(hi) << "]\n";
    return 0;
}

int cmd_stability(const CommonArgs& args, const std::string& about, std::optional<double> S_flag,
                  std::optional<double> R_flag, std::optional<double> V_flag) {
    Scenario sc = resolve_scenario(args);
    Grid grid = Grid::uniform(sc.n_cells);
    ModelCoefficients coeffs = sample_coefficients(sc.coefficients, grid);

    LinearizationMatrix lin;
    nlohmann::json about_json;
    if (about == "disease-free") {
        double S;
        if (S_flag) {
            S = *S_flag;
        } else if (sc.run.contains("S")) {
            S = sc.run["S"].get<double>();
        } else if (coeffs.gamma_is_zero()) {
            S = find_S_star(coeffs, grid); // threshold susceptible size
        } else {
            State s0 = State::from_initial(sample_initial(sc, grid), sc.initial.S0, grid);
            S = s0.P_star;
        }
        lin = assemble_linearization_disease_free(S, coeffs, grid);
        about_json = {{"state", "disease-free"}, {"S", S}};
    } else if (about == "endemic") {
        SteadyState ss;
        if (coeffs.gamma_is_zero()) {
            ss = endemic_bilinear(coeffs, grid, V_flag ? *V_flag : sc.run.value("V_star", 1.0));
        } else {
            ss = endemic_fixed_point(coeffs, grid, R_flag ? *R_flag : sc.run.value("R", 1.0));
        }
        lin = assemble_linearization(ss, coeffs, grid);
        about_json = {{"state", "endemic"},
                      {"S_star", ss.S_star},
                      {"exploratory", ss.exploratory}};
    } else {
        throw validation_error("--about must be 'disease-free' or 'endemic'");
    }

    AbscissaOptions opts;
    opts.seed = sc.seed;
    AbscissaReport full = spectral_abscissa(lin, opts);
    DenseMatrix reduced = mass_zero_projection(lin, grid);
    AbscissaReport projected = spectral_abscissa(reduced, opts);

    // Residual of the conservation eigenvector (0, 1).
    std::vector<double> e_last(grid.n_cells + 1, 0.0);
    e_last.back() = 1.0;
    std::vector<double> image = lin.a.apply(e_last);
    double conservation_residual = std::abs(image.back());
    for (int i = 0; i < grid.n_cells; ++i) conservation_residual += grid.h * std::abs(image[i]);

    auto report_json = [](const AbscissaReport& rep) {
        nlohmann::json j;
        j["abscissa"] = rep.abscissa;
        j["ci_halfwidth"] = rep.ci_halfwidth;
        j["oscillatory"] = rep.oscillatory;
        j["horizon"] = rep.horizon;
        j["ensemble_rates"] = rep.ensemble_rates;
        if (rep.perron_crosscheck) j["perron_crosscheck"] = *rep.perron_crosscheck;
        if (!rep.note.empty()) j["note"] = rep.note;
        return j;
    };

    nlohmann::json j;
    j["about"] = about_json;
    j["abscissa"] = full.abscissa;
    j["abscissa_mass_zero"] = projected.abscissa;
    j["conservation_eigen_residual"] = conservation_residual;
    j["mass_neutrality_defect"] = mass_neutrality_defect(lin, grid);
    j["fit_diagnostics"] = {{"full", report_json(full)}, {"mass_zero", report_json(projected)}};
    write_json_file(ensure_out_dir(args) / "stability.json", j);
    std::cout << "stability: abscissa = " << format17(full.abscissa)
              << ", mass-zero abscissa = " << format17(projected.abscissa) << "\n";
    return 0;
}

int cmd_ode(const CommonArgs& args, int strains, double rho, double beta, double gamma, double I0,
            double S0, double dt, double t_end, const std::string& method) {
    const fs::path dir = ensure_out_dir(args);
    OdeSystem sys;
    OdeState s0;
    if (!args.scenario_path.empty() || !args.preset_name.empty()) {
        // Finite-strain system derived from the PDE discretization.
        Scenario sc = resolve_scenario(args);
        Grid grid = Grid::uniform(sc.n_cells);
        ModelCoefficients coeffs = sample_coefficients(sc.coefficients, grid);
        sys = ode_system_from_pde(coeffs, grid);
        std::vector<double> v0 = sample_initial(sc, grid);
        s0.I.resize(grid.n_cells);
        for (int i = 0; i < grid.n_cells; ++i) s0.I[i] = grid.h * v0[i];
        s0.S = sc.initial.S0;
        if (args.dt) dt = *args.dt;
        if (args.t_end) t_end = *args.t_end;
        // The mutation rates scale like d/h^2, so explicit stepping has a
        // stiff stability limit (Gershgorin bound on the linear part).
        double max_rate = 0.0;
        for (int i = 0; i < grid.n_cells; ++i) {
            double out_rate = sys.rho[i];
            for (int j = 0; j < grid.n_cells; ++j) out_rate += sys.d_matrix(j, i);
            max_rate = std::max(max_rate, out_rate);
        }
        if (method == "rk4" && max_rate > 0.0 && dt > 1.0 / max_rate) {
            dt = 1.0 / max_rate;
            std::cout << "ode: dt reduced to " << format17(dt)
                      << " (explicit stability limit of the mutation rates)\n";
        }
    } else {
        if (strains != 1) {
            throw validation_error("multi-strain runs need a scenario file; flags cover the "
                                   "single-strain model");
        }
        sys = OdeSystem::single_strain(rho, beta, gamma);
        s0.I = {I0};
        s0.S = S0;
    }
    const OdeMethod m = method == "adaptive" ? OdeMethod::adaptive : OdeMethod::rk4;
    OdeTrajectory traj = ode_integrate(s0, sys, dt, t_end, m, 1e-10,
                                       std::max<int>(1, static_cast<int>(t_end / dt / 1000)));

    {
        std::vector<std::string> header = {"t"};
        for (int i = 0; i < sys.n_strains; ++i) header.push_back("I" + std::to_string(i));
        header.push_back("S");
        CsvWriter csv(dir / "trajectory.csv", header);
        std::vector<double> row(sys.n_strains + 2);
        for (const OdeState& s : traj.states) {
            row[0] = s.t;
            for (int i = 0; i < sys.n_strains; ++i) row[1 + i] = s.I[i];
            row[sys.n_strains + 1] = s.S;
            csv.row(row);
        }
    }
    nlohmann::json j;
    j["aborted"] = traj.aborted;
    if (traj.aborted) j["abort_reason"] = traj.abort_reason;
    j["t_final"] = traj.back().t;
    j["conservation_drift"] = traj.max_conservation_drift;
    if (sys.n_strains == 1 && sys.gamma[0] > 0.0) {
        j["critical_population_size"] = critical_population_size(sys);
        nlohmann::json eq = nlohmann::json::array();
        for (auto [V, S] : ode_endemic_equilibria(sys, s0.total_population())) {
            eq.push_back({{"V", V}, {"S", S}});
        }
        j["equilibria"] = eq;
    }
    write_json_file(dir / "summary.json", j);
    std::cout << "ode: " << traj.states.size() << " states to t = " << format17(traj.back().t)
              << (traj.aborted ? " (aborted: " + traj.abort_reason + ")" : "") << "\n";
    return 0;
}

int cmd_blowup_scan(const CommonArgs& args, std::vector<int> n_list, std::vector<double> dt_list) {
    Scenario sc = resolve_scenario(args);
    const fs::path dir = ensure_out_dir(args);

    BlowupReport report;
    if (n_list.empty()) {
        Grid grid = sc.n_cells == 1 ? Grid::degenerate_single_cell() : Grid::uniform(sc.n_cells);
        ModelCoefficients coeffs = sample_coefficients(sc.coefficients, grid);
        State s0 = State::from_initial(sample_initial(sc, grid), sc.initial.S0, grid);
        BlowupConfig cfg;
        cfg.dt_base = sc.run.value("dt_base", sc.integrator.dt);
        cfg.t_max = sc.run.value("t_max", sc.integrator.t_end);
        cfg.linf_threshold_factor = sc.run.value("linf_threshold_factor", 1e8);
        cfg.record_every = sc.run.value("record_every", 1);
        cfg.max_steps = sc.run.value("max_steps", static_cast<long>(2'000'000));
        cfg.scheme = sc.integrator.scheme;
        report = blowup_run(s0, coeffs, grid, cfg);
    } else {
        if (dt_list.empty()) dt_list.push_back(sc.run.value("dt_base", sc.integrator.dt));
        report = refinement_study(sc, n_list, dt_list);
    }

    {
        const std::string header[] = {"t", "linf_v"};
        CsvWriter csv(dir / "linf_series.csv", header);
        for (auto [t, v] : report.linf_series) {
            const double row[] = {t, v};
            csv.row(row);
        }
    }
    {
        const std::string header[] = {"t", "mass"};
        CsvWriter csv(dir / "mass_series.csv", header);
        for (auto [t, m] : report.mass_series) {
            const double row[] = {t, m};
            csv.row(row);
        }
    }
    nlohmann::json j;
    j["blowup_suspected"] = report.blowup_suspected;
    if (report.t_estimate) j["t_estimate"] = *report.t_estimate;
    j["t_reached"] = report.t_reached;
    j["dt_min_reached"] = report.dt_min_reached;
    j["max_mass_defect"] = report.max_mass_defect;
    j["stop_reason"] = report.stop_reason;
    if (!report.advisory.empty()) j["advisory"] = report.advisory;
    if (!report.refinement_table.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const RefinementRow& row : report.refinement_table) {
            nlohmann::json r = {{"n_cells", row.n_cells},
                                {"dt_base", row.dt_base},
                                {"dt_min_reached", row.dt_min_reached},
                                {"suspected", row.suspected}};
            if (row.t_estimate) r["t_estimate"] = *row.t_estimate;
            rows.push_back(r);
        }
        j["refinement_table"] = rows;
        j["refinement_verdict"] = report.refinement_verdict;
    }
    write_json_file(dir / "report.json", j);
    std::cout << "blowup-scan: " << report.stop_reason
              << (report.blowup_suspected ? " (blow-up suspected)" : " (no blow-up indication)")
              << "\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"strainsis: numerical laboratory for a strain-structured SIS model with "
                 "superlinear infection"};
    app.require_subcommand(1);

    CommonArgs simulate_args;
    auto* simulate = app.add_subcommand("simulate", "integrate the full system");
    add_common(simulate, simulate_args);

    CommonArgs steady_args;
    std::string gamma_mode = "fixed-point";
    std::optional<double> R_flag, V_flag;
    auto* steady = app.add_subcommand("steady-state", "compute an endemic steady state");
    add_common(steady, steady_args);
    steady->add_option("--gamma-mode", gamma_mode, "bilinear | fixed-point");
    steady->add_option("--R", R_flag, "susceptible size S* = R (fixed-point mode)");
    steady->add_option("--V-star", V_flag, "infected mass (bilinear mode)");

    CommonArgs scan_args;
    std::string axis = "R";
    double scan_lo = 0.0, scan_hi = 1.0;
    int scan_count = 11;
    std::optional<double> scan_R;
    auto* scan = app.add_subcommand("spectral-scan", "scan the spectral bound along R or theta");
    add_common(scan, scan_args);
    scan->add_option("--axis", axis, "R | theta");
    scan->add_option("--lo", scan_lo, "scan start");
    scan->add_option("--hi", scan_hi, "scan end");
    scan->add_option("--count", scan_count, "number of points");
    scan->add_option("--R", scan_R, "fixed R for theta scans");

    CommonArgs stability_args;
    std::string about = "disease-free";
    std::optional<double> S_flag, stab_R, stab_V;
    auto* stability = app.add_subcommand("stability", "linearized stability indicators");
    add_common(stability, stability_args);
    stability->add_option("--about", about, "disease-free | endemic");
    stability->add_option("--S", S_flag, "susceptible size of the disease-free state");
    stability->add_option("--R", stab_R, "endemic fixed-point R");
    stability->add_option("--V-star", stab_V, "endemic bilinear V*");

    CommonArgs ode_args;
    int strains = 1;
    double ode_rho = 1.0, ode_beta = 2.0, ode_gamma = 1.0, ode_I0 = 0.5, ode_S0 = 1.5;
    double ode_dt = 1e-3, ode_t_end = 10.0;
    std::string ode_method = "rk4";
    auto* ode = app.add_subcommand("ode", "finite-strain reductions");
    add_common(ode, ode_args);
    ode->add_option("--strains", strains, "number of strains (1 without a scenario)");
    ode->add_option("--rho", ode_rho, "recovery rate");
    ode->add_option("--beta", ode_beta, "transmission rate");
    ode->add_option("--gamma", ode_gamma, "incidence exponent");
    ode->add_option("--I0", ode_I0, "initial infected");
    ode->add_option("--S0", ode_S0, "initial susceptible");
    ode->add_option("--ode-dt", ode_dt, "time step");
    ode->add_option("--ode-t-end", ode_t_end, "final time");
    ode->add_option("--method", ode_method, "rk4 | adaptive");

    CommonArgs blowup_args;
    std::vector<int> n_list;
    std::vector<double> dt_list;
    auto* blowup = app.add_subcommand("blowup-scan", "explore the Gamma > 1 regime");
    add_common(blowup, blowup_args);
    blowup->add_option("--n-list", n_list, "refinement grid sizes (increasing)");
    blowup->add_option("--dt-list", dt_list, "refinement time steps");

    CommonArgs validate_args;
    auto* validate = app.add_subcommand("validate", "check a scenario against the model bounds");
    add_common(validate, validate_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    const CommonArgs* active = nullptr;
    if (simulate->parsed()) active = &simulate_args;
    if (steady->parsed()) active = &steady_args;
    if (scan->parsed()) active = &scan_args;
    if (stability->parsed()) active = &stability_args;
    if (ode->parsed()) active = &ode_args;
    if (blowup->parsed()) active = &blowup_args;
    if (validate->parsed()) active = &validate_args;

    try {
        if (simulate->parsed()) return cmd_simulate(simulate_args);
        if (steady->parsed()) return cmd_steady_state(steady_args, gamma_mode, R_flag, V_flag);
        if (scan->parsed()) return cmd_spectral_scan(scan_args, axis, scan_lo, scan_hi, scan_count, scan_R);
        if (stability->parsed()) return cmd_stability(stability_args, about, S_flag, stab_R, stab_V);
        if (ode->parsed()) {
            return cmd_ode(ode_args, strains, ode_rho, ode_beta, ode_gamma, ode_I0, ode_S0,
                           ode_dt, ode_t_end, ode_method);
        }
        if (blowup->parsed()) return cmd_blowup_scan(blowup_args, n_list, dt_list);
        if (validate->parsed()) return cmd_validate(validate_args);
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const convergence_error& e) {
        std::cerr << "solver did not converge: " << e.what() << "\n";
        if (active) {
            try {
                write_json_file(ensure_out_dir(*active) / "report.json",
                                {{"error", e.what()}, {"last_residual", e.last_residual}});
            } catch (...) {
            }
        }
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "malformed scenario: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 64;
}

} // namespace strainsis::cli
