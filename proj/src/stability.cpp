#include "strainsis/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "strainsis/errors.hpp"
#include "strainsis/operators.hpp"
#include "strainsis/simd.hpp"
#include "strainsis/spectral.hpp"

namespace strainsis {

namespace {

double pow_gamma(double u, double g) {
    if (g == 0.0) return 1.0;
    if (g == 1.0) return u;
    return std::pow(u, g);
}

LinearizationMatrix assemble_about(std::span<const double> v_star, double S_star,
                                   const ModelCoefficients& coeffs, const Grid& grid) {
    const int n = grid.n_cells;
    LinearizationMatrix lin;
    lin.n_cells = n;
    lin.a = DenseMatrix(n + 1, n + 1);
    OperatorMatrix diff = assemble_diffusion(coeffs, grid);

    std::vector<double> v_pow_gamma(n), v_pow_1pg(n);
    for (int j = 0; j < n; ++j) {
        v_pow_gamma[j] = pow_gamma(v_star[j], coeffs.gamma[j]);
        v_pow_1pg[j] = v_star[j] * v_pow_gamma[j];
    }

    for (int i = 0; i < n; ++i) {
        double wR = 0.0;
        for (int j = 0; j < n; ++j) {
            const double kernel = grid.h * coeffs.beta(i, j) * (1.0 + coeffs.gamma[j]) * v_pow_gamma[j];
            lin.a(i, j) = diff.a(i, j) + S_star * kernel;
            wR += grid.h * coeffs.beta(i, j) * v_pow_1pg[j];
        }
        lin.a(i, i) -= coeffs.rho[i];
        lin.a(i, n) = wR;
    }
    for (int j = 0; j < n; ++j) {
        double colsum = 0.0;
        for (int i = 0; i < n; ++i) colsum += coeffs.beta(i, j);
        lin.a(n, j) = grid.h * coeffs.rho[j] -
                      S_star * grid.h * grid.h * colsum * (1.0 + coeffs.gamma[j]) * v_pow_gamma[j];
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) total += coeffs.beta(i, j) * v_pow_1pg[j];
    }
    lin.a(n, n) = -grid.h * grid.h * total;
    return lin;
}

struct LinearFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double max_deviation = 0.0;
};

LinearFit fit_line(std::span<const double> t, std::span<const double> y) {
    const std::size_t m = t.size();
    double tm = 0.0, ym = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        tm += t[k];
        ym += y[k];
    }
    tm /= m;
    ym /= m;
    double stt = 0.0, sty = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        stt += (t[k] - tm) * (t[k] - tm);
        sty += (t[k] - tm) * (y[k] - ym);
    }
    LinearFit fit;
    fit.slope = sty / stt;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double r = y[k] - ym - fit.slope * (t[k] - tm);
        ss_res += r * r;
        fit.max_deviation = std::max(fit.max_deviation, std::abs(r));
    }
    if (m > 2) fit.stderr_slope = std::sqrt(ss_res / ((m - 2) * stt));
    return fit;
}

/// Trapezoidal propagation of w' = L w collecting log-norm samples; w is
/// renormalized every step so long horizons neither overflow nor underflow.
struct LogNormTrace {
    std::vector<double> times;
    std::vector<double> lognorm;
};

LogNormTrace propagate(const DenseMatrix& l, std::span<const double> w0, double horizon,
                       int steps) {
    const int m = l.rows();
    const double dt = horizon / steps;
    DenseMatrix lhs(m, m), rhs_op(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            lhs(i, j) = -0.5 * dt * l(i, j);
            rhs_op(i, j) = 0.5 * dt * l(i, j);
        }
        lhs(i, i) += 1.0;
        rhs_op(i, i) += 1.0;
    }
    LuFactors lu = lu_factor(std::move(lhs));

    std::vector<double> w(w0.begin(), w0.end());
    double norm = simd::asum(w);
    if (norm == 0.0) throw validation_error("fitted_mode_rate: zero start vector");
    simd::scal(1.0 / norm, w);

    LogNormTrace trace;
    trace.times.reserve(steps + 1);
    trace.lognorm.reserve(steps + 1);
    double log_accum = 0.0;
    trace.times.push_back(0.0);
    trace.lognorm.push_back(0.0);
    std::vector<double> tmp(m);
    for (int k = 1; k <= steps; ++k) {
        rhs_op.apply(w, tmp);
        lu.solve(tmp);
        w.swap(tmp);
        norm = simd::asum(w);
        if (norm == 0.0) throw solver_error("linearized flow collapsed to zero");
        log_accum += std::log(norm);
        simd::scal(1.0 / norm, w);
        trace.times.push_back(k * dt);
        trace.lognorm.push_back(log_accum);
    }
    return trace;
}

bool is_metzler(const DenseMatrix& a) {
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            if (i != j && a(i, j) < 0.0) return false;
        }
    }
    return true;
}

} // namespace

LinearizationMatrix assemble_linearization(const SteadyState& ss, const ModelCoefficients& coeffs,
                                           const Grid& grid) {
    const double res = stationary_residual(ss.v_star, ss.S_star, coeffs, grid);
    if (res > 1e-6) {
        throw validation_error("assemble_linearization requires a verified steady state "
                               "(stationary residual " +
                               std::to_string(res) + ")");
    }
    return assemble_about(ss.v_star, ss.S_star, coeffs, grid);
}

LinearizationMatrix assemble_linearization_disease_free(double S_star,
                                                        const ModelCoefficients& coeffs,
                                                        const Grid& grid) {
    if (S_star < 0.0) throw validation_error("S_star must be nonnegative");
    std::vector<double> zero(grid.n_cells, 0.0);
    return assemble_about(zero, S_star, coeffs, grid);
}

double mass_neutrality_defect(const LinearizationMatrix& lin, const Grid& grid) {
    const int n = lin.n_cells;
    double worst = 0.0;
    for (int j = 0; j <= n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += grid.h * lin.a(i, j);
        acc += lin.a(n, j);
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

DenseMatrix mass_zero_projection(const LinearizationMatrix& lin, const Grid& grid) {
    if (mass_neutrality_defect(lin, grid) > 1e-10) {
        throw validation_error("mass_zero_projection: the linearization violates the "
                               "mass-neutrality identity");
    }
    const int n = lin.n_cells;
    DenseMatrix out(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out(i, j) = lin.a(i, j) - grid.h * lin.a(i, n);
        }
    }
    return out;
}

double fitted_mode_rate(const DenseMatrix& l, std::span<const double> w0, double horizon,
                        int steps) {
    LogNormTrace trace = propagate(l, w0, horizon, steps);
    return fit_line(trace.times, trace.lognorm).slope;
}

AbscissaReport spectral_abscissa(const DenseMatrix& l, const AbscissaOptions& opts) {
    const int m = l.rows();
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::vector<double>> starts(opts.ensemble);
    for (auto& w : starts) {
        w.resize(m);
        for (double& x : w) x = unit(rng);
    }

    AbscissaReport report;
    double prev = 0.0;
    double horizon = opts.first_horizon;
    for (int round = 0; round <= opts.max_doublings; ++round) {
        double best = -std::numeric_limits<double>::infinity();
        double best_stderr = 0.0;
        double worst_dev = 0.0;
        report.ensemble_rates.clear();
        for (const auto& w0 : starts) {
            LogNormTrace trace = propagate(l, w0, horizon, opts.steps_per_horizon);
            // Fit over the second half: start-vector transients and the
            // trapezoidal ringing of stiff modes have died off there.
            const std::size_t from = trace.times.size() / 2;
            LinearFit fit = fit_line(std::span(trace.times).subspan(from),
                                     std::span(trace.lognorm).subspan(from));
            report.ensemble_rates.push_back(fit.slope);
            worst_dev = std::max(worst_dev, fit.max_deviation);
            if (fit.slope > best) {
                best = fit.slope;
                best_stderr = fit.stderr_slope;
            }
        }
        report.horizon = horizon;
        report.abscissa = best;
        report.ci_halfwidth = std::abs(best - prev) + best_stderr;
        if (round > 0 && std::abs(best - prev) <= opts.tol) {
            report.oscillatory = worst_dev > 0.05 * (1.0 + std::abs(best) * horizon);
            break;
        }
        if (round == opts.max_doublings) {
            report.oscillatory = true;
            report.note = "growth-rate fit did not stabilize; dominant pair may be oscillatory";
        }
        prev = best;
        horizon *= 2.0;
    }

    if (opts.perron_crosscheck && is_metzler(l)) {
        PowerOptions popts;
        popts.tol = 1e-8;
        popts.max_iterations = 200000;
        try {
            report.perron_crosscheck = perron_spectral_bound(l, popts).s;
        } catch (const convergence_error&) {
            if (!report.note.empty()) report.note += "; ";
            report.note += "perron cross-check did not converge within budget";
        }
    }
    return report;
}

AbscissaReport spectral_abscissa(const LinearizationMatrix& lin, const AbscissaOptions& opts) {
    return spectral_abscissa(lin.a, opts);
}

} // namespace strainsis
