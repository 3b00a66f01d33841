#include "strainsis/grid.hpp"

#include <cmath>

#include "strainsis/errors.hpp"
#include "strainsis/simd.hpp"

namespace strainsis {

namespace {

Grid make(int n) {
    Grid g;
    g.n_cells = n;
    g.h = 1.0 / n;
    g.centers.resize(n);
    for (int i = 0; i < n; ++i) g.centers[i] = (i + 0.5) * g.h;
    return g;
}

void check_length(std::span<const double> f, const Grid& grid, const char* op) {
    if (static_cast<int>(f.size()) != grid.n_cells) {
        throw validation_error(std::string(op) + ": field length " + std::to_string(f.size()) +
                               " does not match grid with " + std::to_string(grid.n_cells) + " cells");
    }
}

} // namespace

Grid Grid::uniform(int n_cells) {
    if (n_cells < 2) throw validation_error("Grid::uniform requires n_cells >= 2");
    return make(n_cells);
}

Grid Grid::degenerate_single_cell() { return make(1); }

double quadrature(std::span<const double> f, const Grid& grid) {
    check_length(f, grid, "quadrature");
    return grid.h * simd::sum(f);
}

double l1_norm(std::span<const double> f, const Grid& grid) {
    check_length(f, grid, "l1_norm");
    return grid.h * simd::asum(f);
}

double linf_norm(std::span<const double> f) { return simd::amax(f); }

double discrete_w11_norm(std::span<const double> f, const Grid& grid) {
    check_length(f, grid, "discrete_w11_norm");
    double tv = 0.0;
    const int n = grid.n_cells;
    for (int i = 1; i < n; ++i) tv += std::abs(f[i] - f[i - 1]);
    if (n >= 2) tv += std::abs(f[n - 1] - f[n - 2]); // last cell reuses the final slope
    return l1_norm(f, grid) + tv;
}

} // namespace strainsis
