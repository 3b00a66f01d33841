#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "strainsis/simd.hpp"

namespace strainsis {

/// Dense row-major matrix. Products route through the dispatched kernels.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::span<const double> data() const { return a_; }
    std::span<double> data() { return a_; }
    std::span<const double> row(int i) const {
        return std::span<const double>(a_.data() + static_cast<std::size_t>(i) * cols_, cols_);
    }

    void apply(std::span<const double> x, std::span<double> y) const {
        simd::matvec(a_, rows_, cols_, x, y);
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(rows_);
        apply(x, y);
        return y;
    }

    void add_to_diagonal(double c) {
        for (int i = 0; i < rows_ && i < cols_; ++i) (*this)(i, i) += c;
    }

    bool operator==(const DenseMatrix&) const = default;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

/// Tridiagonal system, Thomas elimination. The dynamics module only ever
/// solves I - c*A_diff systems, which are strictly diagonally dominant, so
/// no pivoting is needed.
struct Tridiagonal {
    std::vector<double> lower; // size n-1
    std::vector<double> diag;  // size n
    std::vector<double> upper; // size n-1

    int n() const { return static_cast<int>(diag.size()); }
    std::vector<double> apply(std::span<const double> x) const;
    /// Solves (this) * x = rhs in place.
    void solve(std::span<double> rhs) const;
    /// Returns I - c * (this).
    Tridiagonal identity_minus(double c) const;
};

/// LU with partial pivoting for the small dense solves (Newton polish,
/// implicit integration of linearizations).
struct LuFactors {
    DenseMatrix lu;
    std::vector<int> pivots;
    bool singular = false;

    void solve(std::span<double> rhs) const;
};

LuFactors lu_factor(DenseMatrix a);

} // namespace strainsis
