#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "strainsis/grid.hpp"
#include "strainsis/linalg.hpp"

namespace strainsis {

// 1-D coefficient function presets and tabulated data. The model does not
// single out concrete d, rho, beta, gamma; every preset here is a choice of
// this toolkit (see README).

struct ConstantFn {
    double value = 0.0;
    bool operator==(const ConstantFn&) const = default;
};
struct LinearFn {
    double intercept = 0.0;
    double slope = 0.0;
    bool operator==(const LinearFn&) const = default;
};
/// floor + amplitude * exp(-((x-center)/width)^2)
struct GaussianFn {
    double amplitude = 1.0;
    double center = 0.5;
    double width = 0.1;
    double floor_value = 0.0;
    bool operator==(const GaussianFn&) const = default;
};
/// offset + amplitude * cos(mode * pi * x); Neumann-compatible bumps.
struct CosineFn {
    double offset = 0.0;
    double amplitude = 1.0;
    int mode = 1;
    bool operator==(const CosineFn&) const = default;
};
/// Piecewise-linear interpolation through (x, value) knots; clamped outside.
struct TableFn {
    std::vector<std::pair<double, double>> knots;
    bool operator==(const TableFn&) const = default;
};

using FunctionSpec = std::variant<ConstantFn, LinearFn, GaussianFn, CosineFn, TableFn>;

double evaluate(const FunctionSpec& spec, double x);
std::vector<double> sample(const FunctionSpec& spec, const Grid& grid);

// Transmission kernel beta(x, y).

struct ConstantKernel {
    double value = 0.0;
    bool operator==(const ConstantKernel&) const = default;
};
/// floor + amplitude * exp(-((x-y)/width)^2); mass concentrated near the
/// diagonal (strains mostly reinfect nearby strains).
struct GaussianKernel {
    double amplitude = 1.0;
    double width = 0.1;
    double floor_value = 0.0;
    bool operator==(const GaussianKernel&) const = default;
};
/// beta(x,y) = fx(x) * fy(y)
struct SeparableKernel {
    FunctionSpec fx;
    FunctionSpec fy;
    bool operator==(const SeparableKernel&) const = default;
};
/// Bilinear interpolation on a tensor grid of knots.
struct TableKernel {
    std::vector<double> xs;
    std::vector<double> ys;
    DenseMatrix values; // xs.size() rows, ys.size() cols
    bool operator==(const TableKernel&) const = default;
};

using KernelSpec = std::variant<ConstantKernel, GaussianKernel, SeparableKernel, TableKernel>;

double evaluate(const KernelSpec& spec, double x, double y);

struct CoefficientSpec {
    FunctionSpec d = ConstantFn{1.0};
    FunctionSpec rho = ConstantFn{1.0};
    KernelSpec beta = ConstantKernel{2.0};
    FunctionSpec gamma = ConstantFn{0.0};
    bool operator==(const CoefficientSpec&) const = default;
};

/// Bounds in the model hypotheses, derived from the sampled fields.
/// d1 is a C1-norm proxy: max|d| plus the largest finite-difference slope.
struct HypoBounds {
    double b = 0.0;     // max beta
    double d0 = 0.0;    // min d, must be > 0
    double d1 = 0.0;
    double r = 0.0;     // max rho
    double Gamma = 0.0; // max gamma
};

struct ModelCoefficients {
    std::vector<double> d;
    std::vector<double> rho;
    std::vector<double> gamma;
    DenseMatrix beta;
    HypoBounds bounds;
    double beta_min = 0.0;

    int n() const { return static_cast<int>(d.size()); }
    bool gamma_is_zero() const;
};

/// Samples the spec on the grid and validates the model hypotheses
/// (d bounded below by a positive d0; rho, beta, gamma nonnegative).
ModelCoefficients sample_coefficients(const CoefficientSpec& spec, const Grid& grid);

} // namespace strainsis
