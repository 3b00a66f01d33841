#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "strainsis/coefficients.hpp"
#include "strainsis/dynamics.hpp"
#include "strainsis/grid.hpp"

namespace strainsis {

struct InitialSpec {
    FunctionSpec v0 = ConstantFn{0.5};
    double S0 = 0.5;
    bool operator==(const InitialSpec&) const = default;
};

/// One reproducible run: coefficients, grid size, integrator settings,
/// initial data, subcommand parameters and the ensemble seed. Validated
/// against the model hypotheses at load time.
struct Scenario {
    std::string name;
    int n_cells = 128;
    CoefficientSpec coefficients;
    IntegratorConfig integrator;
    InitialSpec initial;
    nlohmann::json run = nlohmann::json::object();
    std::uint64_t seed = 0;

    bool operator==(const Scenario&) const;
};

nlohmann::json function_spec_to_json(const FunctionSpec& spec);
FunctionSpec function_spec_from_json(const nlohmann::json& j);
nlohmann::json kernel_spec_to_json(const KernelSpec& spec);
KernelSpec kernel_spec_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const nlohmann::json& j);

/// Reads .toml or .json by extension and validates the hypotheses bounds
/// (sampling the coefficients once on the scenario grid).
Scenario load_scenario(const std::filesystem::path& path);

/// Named scenarios shipped with the tool; every entry passes validation.
const std::vector<Scenario>& preset_catalog();
const Scenario* find_preset(std::string_view name);

std::vector<double> sample_initial(const Scenario& sc, const Grid& grid);

} // namespace strainsis
