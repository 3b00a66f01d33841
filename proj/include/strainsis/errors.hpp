#pragma once

#include <stdexcept>
#include <string>

namespace strainsis {

/// Bad input or a scenario violating the model hypotheses. Maps to exit 1.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative solver ran out of budget. Maps to exit 2; carries the last
/// residual so reports stay useful.
struct convergence_error : std::runtime_error {
    convergence_error(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
    double last_residual = 0.0;
};

/// Internal inconsistency (singular solve, residual check failure).
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A time step produced a negative density beyond the roundoff floor.
struct positivity_error : solver_error {
    positivity_error(const std::string& what, double worst)
        : solver_error(what), min_value(worst) {}
    double min_value = 0.0;
};

} // namespace strainsis
