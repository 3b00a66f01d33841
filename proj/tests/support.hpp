#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "strainsis/coefficients.hpp"
#include "strainsis/grid.hpp"

// Shared test helpers: seeded random fields and smooth random coefficient
// draws that respect the model hypotheses.

namespace testsupport {

inline std::vector<double> random_vector(std::mt19937_64& rng, int n, double lo = -1.0,
                                         double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

inline std::vector<double> random_positive_vector(std::mt19937_64& rng, int n, double lo = 0.1,
                                                  double hi = 2.0) {
    return random_vector(rng, n, lo, hi);
}

/// Smooth strictly positive 1-D field: base plus a few low Fourier modes with
/// amplitudes small enough to keep the field above base/2.
inline strainsis::FunctionSpec random_smooth_function(std::mt19937_64& rng, double base,
                                                      double amplitude) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> mode(1, 3);
    strainsis::CosineFn f;
    f.offset = base;
    f.amplitude = amplitude * unit(rng);
    f.mode = mode(rng);
    return f;
}

/// Random smooth coefficient set with strictly positive beta, rho not
/// identically zero, all hypothesis bounds satisfied.
inline strainsis::CoefficientSpec random_smooth_coefficients(std::mt19937_64& rng,
                                                             double gamma_value) {
    strainsis::CoefficientSpec spec;
    spec.d = random_smooth_function(rng, 1.0, 0.3);
    spec.rho = random_smooth_function(rng, 1.0, 0.4);
    spec.gamma = strainsis::ConstantFn{gamma_value};
    strainsis::SeparableKernel kernel;
    kernel.fx = random_smooth_function(rng, 1.5, 0.4);
    kernel.fy = random_smooth_function(rng, 1.5, 0.4);
    spec.beta = kernel;
    return spec;
}

inline std::vector<double> sample_on_grid(const strainsis::Grid& grid,
                                          double (*f)(double)) {
    std::vector<double> out(grid.n_cells);
    for (int i = 0; i < grid.n_cells; ++i) out[i] = f(grid.centers[i]);
    return out;
}

} // namespace testsupport
