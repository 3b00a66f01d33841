#pragma once

#include <span>
#include <vector>

namespace strainsis {

/// Uniform cell-centered mesh on [0,1]. Immutable after construction.
struct Grid {
    int n_cells = 0;
    double h = 0.0;
    std::vector<double> centers; // x_i = (i + 1/2) h

    static Grid uniform(int n_cells);

    /// One-cell mesh for the single-strain degenerate checks of the blow-up
    /// harness. The regular factory rejects n < 2.
    static Grid degenerate_single_cell();
};

/// Midpoint rule: h * sum(f). Exact for cell-wise constants and for linear
/// functions sampled at centers.
double quadrature(std::span<const double> f, const Grid& grid);

/// Discrete L1 norm, h-weighted.
double l1_norm(std::span<const double> f, const Grid& grid);

double linf_norm(std::span<const double> f);

/// quadrature(|f|) plus a forward-difference total-variation term covering
/// all n cells (the last cell reuses the final difference, so linears come
/// out exact: f(x)=x gives 0.5 + 1.0).
double discrete_w11_norm(std::span<const double> f, const Grid& grid);

} // namespace strainsis
