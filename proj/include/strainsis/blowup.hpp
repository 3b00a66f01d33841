#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "strainsis/dynamics.hpp"
#include "strainsis/scenario.hpp"

namespace strainsis {

/// Knobs of the blow-up exploration. The linf threshold and dt floor are
/// proxies, not verdicts; reports keep the raw series so thresholds can be
/// re-judged offline.
struct BlowupConfig {
    double dt_base = 1e-3;
    double t_max = 10.0;
    double linf_threshold_factor = 1e8; // flags at linf > factor * P_star
    double dt_floor = 1e-14;
    long max_steps = 2'000'000;
    int record_every = 1;
    Scheme scheme = Scheme::imex_euler;
    /// Test hook: freezes S, turning the single-cell run into the Bernoulli
    /// baseline. Disables the conservation bookkeeping.
    std::optional<double> pin_S;
};

struct RefinementRow {
    int n_cells = 0;
    double dt_base = 0.0;
    double dt_min_reached = 0.0;
    std::optional<double> t_estimate;
    bool suspected = false;
};

struct BlowupReport {
    bool blowup_suspected = false;
    std::optional<double> t_estimate;
    std::vector<std::pair<double, double>> linf_series; // (t, max_i v_i)
    std::vector<std::pair<double, double>> mass_series; // (t, quadrature(v))
    double max_mass_defect = 0.0; // |quadrature(v) + S - P_star|, unpinned runs
    double dt_min_reached = 0.0;
    double t_reached = 0.0;
    std::string advisory;
    std::string stop_reason;
    std::vector<RefinementRow> refinement_table;
    std::string refinement_verdict;
};

/// Integrates with dt = min(dt_base, 0.5 * estimate_dt_max) toward t_max,
/// recording linf and mass series. Suspects blow-up when linf crosses the
/// threshold or dt underflows; t_estimate then comes from a linear fit of
/// 1/linf against t on the final window. Gamma <= 1 input runs too, with an
/// advisory (global existence holds there; this is the consistency control).
BlowupReport blowup_run(const State& state0, const ModelCoefficients& coeffs, const Grid& grid,
                        const BlowupConfig& cfg);

/// Repeats blowup_run over the (n, dt) grid of a scenario and reports
/// whether t_estimate stabilizes under refinement (evidence for a genuine
/// singularity) or recedes (evidence against). Verdicts are labeled
/// evidence, never conclusions.
BlowupReport refinement_study(const Scenario& scenario, std::span<const int> n_list,
                              std::span<const double> dt_list);

} // namespace strainsis
