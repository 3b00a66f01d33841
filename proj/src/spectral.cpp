#include "strainsis/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "strainsis/errors.hpp"
#include "strainsis/linalg.hpp"
#include "strainsis/simd.hpp"

namespace strainsis {

namespace {

constexpr double kSRootTol = 1e-8;      // |s| at a reported root
constexpr double kBracketRel = 1e-10;   // bisection bracket width, relative

void check_metzler(const DenseMatrix& a) {
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            if (i != j && a(i, j) < 0.0) {
                throw validation_error("spectral_bound requires a Metzler matrix "
                                       "(negative off-diagonal at " +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

} // namespace

SpectralResult perron_spectral_bound(const DenseMatrix& a, const PowerOptions& opts) {
    check_metzler(a);
    const int n = a.rows();

    double shift = 0.0;
    for (int i = 0; i < n; ++i) shift = std::max(shift, std::abs(a(i, i)));
    shift += 1.0;
    DenseMatrix m = a;
    m.add_to_diagonal(shift);

    std::vector<double> x(n, 1.0 / n);
    if (!opts.warm_start.empty() && static_cast<int>(opts.warm_start.size()) == n) {
        for (int i = 0; i < n; ++i) x[i] = std::max(opts.warm_start[i], 0.0);
        const double norm = simd::asum(x);
        if (norm > 0.0) {
            simd::scal(1.0 / norm, x);
        } else {
            x.assign(n, 1.0 / n);
        }
    }

    std::vector<double> y(n);
    double s_est = 0.0;
    double s_prev = 0.0;
    double residual = 0.0;
    int it = 0;
    bool converged = false;

    auto assess = [&](double lambda) {
        s_est = lambda - shift;
        residual = 0.0;
        for (int i = 0; i < n; ++i) residual += std::abs(y[i] - lambda * x[i]);
        const bool increment_ok =
            it > 1 && std::abs(s_est - s_prev) <= opts.tol * (1.0 + std::abs(s_est));
        const bool residual_ok = residual <= opts.tol * (1.0 + std::abs(s_est));
        const bool sign_settled = opts.sign_certainty_factor > 0.0 &&
                                  std::abs(s_est) > opts.sign_certainty_factor * residual;
        converged = (increment_ok && residual_ok) || sign_settled;
        s_prev = s_est;
    };

    // Phase 1: plain power iteration on the shifted matrix. With a warm or
    // near-eigenvector start this finishes in a handful of steps; cold
    // starts on fine grids are rate-limited by the O(n^2) shift, so a
    // budget hands over to the resolvent phase below.
    const int power_budget = std::min(opts.max_iterations, 2000 + 10 * n);
    for (; it < power_budget && !converged;) {
        ++it;
        m.apply(x, y);
        assess(simd::dot(x, y) / simd::dot(x, x));
        if (converged) break;
        const double norm = simd::asum(y);
        if (norm == 0.0) throw solver_error("power iteration collapsed to the zero vector");
        simd::scal(1.0 / norm, y);
        x.swap(y);
    }

    // Phase 2: power iteration on the resolvent (tau I - M)^(-1). For
    // irreducible M and tau > lambda_1 the resolvent is a strictly positive
    // matrix with the same Perron vector, so the iteration stays inside the
    // Perron framework while its rate is set by |tau - lambda_1| against
    // the spectral gap rather than gap / shift. tau keeps an order-unity
    // distance above the Rayleigh estimate: pushing it closer makes the
    // factorization so ill-conditioned that solve noise exceeds the
    // convergence tolerance and the iteration levels off. The margin grows
    // whenever an outer round stops improving the residual.
    double margin = 1.0;
    {
        double cw_lo = std::numeric_limits<double>::infinity();
        double cw_hi = -std::numeric_limits<double>::infinity();
        m.apply(x, y);
        for (int i = 0; i < n; ++i) {
            if (x[i] > 1e-300) {
                const double ratio = y[i] / x[i];
                cw_lo = std::min(cw_lo, ratio);
                cw_hi = std::max(cw_hi, ratio);
            }
        }
        margin = std::max(0.5 * (cw_hi - cw_lo), 1.0);
    }
    while (!converged) {
        m.apply(x, y);
        const double lambda = simd::dot(x, y) / simd::dot(x, x);
        const double tau = lambda + margin;
        DenseMatrix resolvent(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) resolvent(i, j) = -m(i, j);
            resolvent(i, i) += tau;
        }
        LuFactors lu = lu_factor(std::move(resolvent));
        if (lu.singular) {
            throw solver_error("resolvent solve failed; matrix is not irreducible Metzler");
        }
        const double residual_before = residual;
        for (int inner = 0; inner < 8 && !converged; ++inner) {
            if (++it > opts.max_iterations) {
                throw convergence_error("power iteration stagnated after " +
                                            std::to_string(opts.max_iterations) +
                                            " iterations (l1 residual " +
                                            std::to_string(residual) + ")",
                                        residual);
            }
            y = x;
            lu.solve(y);
            const double norm = simd::asum(y);
            if (norm == 0.0) throw solver_error("resolvent iteration collapsed to zero");
            simd::scal(1.0 / norm, y);
            for (int i = 0; i < n; ++i) y[i] = std::abs(y[i]);
            x.swap(y);
            m.apply(x, y);
            assess(simd::dot(x, y) / simd::dot(x, x));
        }
        if (!converged && residual > 0.5 * residual_before) margin *= 4.0;
    }

    const double norm = simd::asum(x);
    simd::scal(1.0 / norm, x);
    SpectralResult out;
    out.s = s_est;
    out.eigvec = std::move(x);
    out.iterations = it;
    out.residual = residual;
    return out;
}

SpectralResult spectral_bound(const OperatorMatrix& op, const Grid& grid,
                              const PowerOptions& opts) {
    SpectralResult res = perron_spectral_bound(op.a, opts);
    // Rescale to the model's W11 normalization and report the h-weighted
    // residual of the returned pair.
    const double w11 = discrete_w11_norm(res.eigvec, grid);
    if (w11 > 0.0) simd::scal(1.0 / w11, res.eigvec);
    std::vector<double> av = op.a.apply(res.eigvec);
    std::vector<double> defect(av);
    simd::axpy(-res.s, res.eigvec, defect);
    res.residual = l1_norm(defect, grid);
    return res;
}

double spectral_bound_along_ray(const ModelCoefficients& coeffs, const Grid& grid,
                                std::span<const double> c, double R, double theta,
                                const PowerOptions& opts) {
    if (theta < 0.0) throw validation_error("ray scale theta must be nonnegative");
    bool all_zero = true;
    for (double ci : c) {
        if (ci < 0.0) throw validation_error("ray direction c must be nonnegative");
        if (ci != 0.0) all_zero = false;
    }
    if (all_zero) throw validation_error("ray direction c must not be identically zero");
    std::vector<double> u(c.begin(), c.end());
    simd::scal(theta, u);
    OperatorMatrix op = assemble_psi_uR(coeffs, grid, u, R);
    return spectral_bound(op, grid, opts).s;
}

double find_S_star(const ModelCoefficients& coeffs, const Grid& grid,
                   std::optional<std::pair<double, double>> bracket_hint) {
    if (!coeffs.gamma_is_zero()) {
        throw validation_error("find_S_star applies to the bilinear model (gamma == 0)");
    }
    if (quadrature(coeffs.rho, grid) <= 0.0) {
        throw validation_error("theorem hypothesis violated: rho must not be identically zero");
    }
    double min_row_integral = 0.0;
    for (int i = 0; i < grid.n_cells; ++i) {
        const double row = grid.h * simd::sum(coeffs.beta.row(i));
        min_row_integral = (i == 0) ? row : std::min(min_row_integral, row);
    }
    if (min_row_integral <= 0.0) {
        throw validation_error(
            "theorem hypothesis violated: int beta(x,y) dy must be positive for every x");
    }

    double lo = 0.0;
    double hi = (coeffs.bounds.r + 1.0) / min_row_integral;
    if (bracket_hint) {
        lo = bracket_hint->first;
        hi = bracket_hint->second;
        if (!(lo >= 0.0 && hi > lo)) throw validation_error("invalid bracket hint");
    }

    std::vector<double> warm;
    auto eval = [&](double R, bool sign_only) {
        PowerOptions opts;
        opts.warm_start = warm;
        if (sign_only) opts.sign_certainty_factor = 100.0;
        SpectralResult r = spectral_bound(assemble_psi_R(coeffs, grid, R), grid, opts);
        warm = r.eigvec;
        return r.s;
    };

    const double s_lo = eval(lo, true);
    const double s_hi = eval(hi, true);
    if (!(s_lo < 0.0) || !(s_hi > 0.0)) {
        throw solver_error("bisection bracket failed: s(" + std::to_string(lo) + ") = " +
                           std::to_string(s_lo) + ", s(" + std::to_string(hi) + ") = " +
                           std::to_string(s_hi));
    }
    // Endpoint monotonicity sanity (strict growth over the bracket).
    if (!(s_lo < s_hi)) throw solver_error("spectral bound failed to increase across the bracket");

    const double width_target = kBracketRel * hi;
    while (hi - lo > width_target) {
        const double mid = 0.5 * (lo + hi);
        if (eval(mid, true) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double R_star = 0.5 * (lo + hi);
    const double s_star = eval(R_star, false);
    if (std::abs(s_star) > kSRootTol) {
        throw solver_error("root verification failed: |s(R*)| = " + std::to_string(std::abs(s_star)));
    }
    return R_star;
}

double f_gamma_min(double Gamma) {
    if (Gamma < 0.0) throw validation_error("Gamma must be nonnegative");
    if (Gamma <= 1.0) return 1.0; // x + (1-x)^Gamma >= x + (1-x)
    return 1.0 - std::pow(Gamma, 1.0 / (1.0 - Gamma)) + std::pow(Gamma, Gamma / (1.0 - Gamma));
}

double theta_star_bound(const ModelCoefficients& coeffs, const Grid& grid, double R) {
    (void)grid;
    if (coeffs.bounds.Gamma < 1.0) {
        throw validation_error("theta_star_bound is stated for Gamma >= 1");
    }
    if (coeffs.beta_min <= 0.0) {
        throw validation_error("theta_star_bound requires a strictly positive beta");
    }
    if (R <= 0.0) throw validation_error("theta_star_bound requires R > 0");
    return (coeffs.bounds.r + 1.0) / (R * f_gamma_min(coeffs.bounds.Gamma) * coeffs.beta_min);
}

} // namespace strainsis
