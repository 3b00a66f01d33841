#include "strainsis/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "strainsis/errors.hpp"
#include "strainsis/toml_lite.hpp"

namespace strainsis {

namespace {

nlohmann::json table_to_json(const TableFn& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [x, v] : t.knots) rows.push_back({x, v});
    return {{"table", rows}};
}

TableFn table_from_json(const nlohmann::json& rows) {
    TableFn t;
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != 2) {
            throw validation_error("a 1-D table row must be [x, value]");
        }
        t.knots.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    if (t.knots.empty()) throw validation_error("empty coefficient table");
    for (std::size_t k = 1; k < t.knots.size(); ++k) {
        if (t.knots[k].first <= t.knots[k - 1].first) {
            throw validation_error("table knots must have strictly increasing x");
        }
    }
    return t;
}

double get_or(const nlohmann::json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

} // namespace

nlohmann::json function_spec_to_json(const FunctionSpec& spec) {
    return std::visit(
        [](const auto& f) -> nlohmann::json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ConstantFn>) {
                return {{"preset", "constant"}, {"value", f.value}};
            } else if constexpr (std::is_same_v<T, LinearFn>) {
                return {{"preset", "linear"}, {"intercept", f.intercept}, {"slope", f.slope}};
            } else if constexpr (std::is_same_v<T, GaussianFn>) {
                return {{"preset", "gaussian"},
                        {"amplitude", f.amplitude},
                        {"center", f.center},
                        {"width", f.width},
                        {"floor", f.floor_value}};
            } else if constexpr (std::is_same_v<T, CosineFn>) {
                return {{"preset", "cosine"},
                        {"offset", f.offset},
                        {"amplitude", f.amplitude},
                        {"mode", f.mode}};
            } else {
                return table_to_json(f);
            }
        },
        spec);
}

FunctionSpec function_spec_from_json(const nlohmann::json& j) {
    if (j.is_number()) return ConstantFn{j.get<double>()}; // bare number shorthand
    if (j.contains("table")) return table_from_json(j.at("table"));
    const std::string preset = j.value("preset", "");
    if (preset == "constant") return ConstantFn{j.at("value").get<double>()};
    if (preset == "linear") return LinearFn{get_or(j, "intercept", 0.0), get_or(j, "slope", 0.0)};
    if (preset == "gaussian") {
        return GaussianFn{get_or(j, "amplitude", 1.0), get_or(j, "center", 0.5),
                          get_or(j, "width", 0.1), get_or(j, "floor", 0.0)};
    }
    if (preset == "cosine") {
        CosineFn f;
        f.offset = get_or(j, "offset", 0.0);
        f.amplitude = get_or(j, "amplitude", 1.0);
        f.mode = j.contains("mode") ? j.at("mode").get<int>() : 1;
        return f;
    }
    throw validation_error("unknown 1-D coefficient preset '" + preset + "'");
}

nlohmann::json kernel_spec_to_json(const KernelSpec& spec) {
    return std::visit(
        [](const auto& k) -> nlohmann::json {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ConstantKernel>) {
                return {{"preset", "constant"}, {"value", k.value}};
            } else if constexpr (std::is_same_v<T, GaussianKernel>) {
                return {{"preset", "gaussian-kernel"},
                        {"amplitude", k.amplitude},
                        {"width", k.width},
                        {"floor", k.floor_value}};
            } else if constexpr (std::is_same_v<T, SeparableKernel>) {
                return {{"preset", "separable"},
                        {"x", function_spec_to_json(k.fx)},
                        {"y", function_spec_to_json(k.fy)}};
            } else {
                nlohmann::json rows = nlohmann::json::array();
                for (int i = 0; i < static_cast<int>(k.xs.size()); ++i) {
                    for (int jj = 0; jj < static_cast<int>(k.ys.size()); ++jj) {
                        rows.push_back({k.xs[i], k.ys[jj], k.values(i, jj)});
                    }
                }
                return {{"table", rows}};
            }
        },
        spec);
}

KernelSpec kernel_spec_from_json(const nlohmann::json& j) {
    if (j.is_number()) return ConstantKernel{j.get<double>()};
    if (j.contains("table")) {
        const auto& rows = j.at("table");
        std::vector<double> xs, ys;
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != 3) {
                throw validation_error("a kernel table row must be [x, y, value]");
            }
            const double x = row[0].get<double>(), y = row[1].get<double>();
            if (xs.empty() || xs.back() != x) xs.push_back(x);
            if (std::find(ys.begin(), ys.end(), y) == ys.end()) ys.push_back(y);
        }
        TableKernel k;
        k.xs = xs;
        k.ys = ys;
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (xs[i] <= xs[i - 1]) throw validation_error("kernel table x knots must increase");
        }
        for (std::size_t i = 1; i < ys.size(); ++i) {
            if (ys[i] <= ys[i - 1]) throw validation_error("kernel table y knots must increase");
        }
        if (rows.size() != xs.size() * ys.size()) {
            throw validation_error("kernel table must cover the full x-y tensor grid");
        }
        k.values = DenseMatrix(static_cast<int>(xs.size()), static_cast<int>(ys.size()));
        std::size_t idx = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            for (std::size_t jj = 0; jj < ys.size(); ++jj, ++idx) {
                const auto& row = rows[idx];
                if (row[0].get<double>() != xs[i] || row[1].get<double>() != ys[jj]) {
                    throw validation_error("kernel table rows must be ordered x-major");
                }
                k.values(static_cast<int>(i), static_cast<int>(jj)) = row[2].get<double>();
            }
        }
        return k;
    }
    const std::string preset = j.value("preset", "");
    if (preset == "constant") return ConstantKernel{j.at("value").get<double>()};
    if (preset == "gaussian-kernel") {
        return GaussianKernel{get_or(j, "amplitude", 1.0), get_or(j, "width", 0.1),
                              get_or(j, "floor", 0.0)};
    }
    if (preset == "separable") {
        return SeparableKernel{function_spec_from_json(j.at("x")),
                               function_spec_from_json(j.at("y"))};
    }
    throw validation_error("unknown kernel preset '" + preset + "'");
}

bool Scenario::operator==(const Scenario& other) const {
    return name == other.name && n_cells == other.n_cells &&
           coefficients == other.coefficients && integrator == other.integrator &&
           initial == other.initial && run == other.run && seed == other.seed;
}

nlohmann::json scenario_to_json(const Scenario& sc) {
    nlohmann::json j;
    j["name"] = sc.name;
    j["grid"] = {{"n_cells", sc.n_cells}};
    j["coefficients"] = {{"d", function_spec_to_json(sc.coefficients.d)},
                         {"rho", function_spec_to_json(sc.coefficients.rho)},
                         {"beta", kernel_spec_to_json(sc.coefficients.beta)},
                         {"gamma", function_spec_to_json(sc.coefficients.gamma)}};
    j["integrator"] = {{"dt", sc.integrator.dt},
                       {"t_end", sc.integrator.t_end},
                       {"scheme", sc.integrator.scheme == Scheme::imex_cn ? "imex_cn" : "imex_euler"},
                       {"snapshot_every", sc.integrator.snapshot_every},
                       {"positivity_floor_report", sc.integrator.positivity_floor_report}};
    j["initial"] = {{"v0", function_spec_to_json(sc.initial.v0)}, {"S0", sc.initial.S0}};
    j["run"] = sc.run;
    j["seed"] = sc.seed;
    return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario sc;
    sc.name = j.value("name", "");
    if (j.contains("grid")) sc.n_cells = j.at("grid").value("n_cells", 128);
    if (j.contains("coefficients")) {
        const auto& c = j.at("coefficients");
        if (c.contains("d")) sc.coefficients.d = function_spec_from_json(c.at("d"));
        if (c.contains("rho")) sc.coefficients.rho = function_spec_from_json(c.at("rho"));
        if (c.contains("beta")) sc.coefficients.beta = kernel_spec_from_json(c.at("beta"));
        if (c.contains("gamma")) sc.coefficients.gamma = function_spec_from_json(c.at("gamma"));
    }
    if (j.contains("integrator")) {
        const auto& icfg = j.at("integrator");
        sc.integrator.dt = icfg.value("dt", 1e-3);
        sc.integrator.t_end = icfg.value("t_end", 1.0);
        const std::string scheme = icfg.value("scheme", "imex_cn");
        if (scheme == "imex_cn") {
            sc.integrator.scheme = Scheme::imex_cn;
        } else if (scheme == "imex_euler") {
            sc.integrator.scheme = Scheme::imex_euler;
        } else {
            throw validation_error("unknown scheme '" + scheme + "'");
        }
        sc.integrator.snapshot_every = icfg.value("snapshot_every", 1);
        sc.integrator.positivity_floor_report = icfg.value("positivity_floor_report", false);
    }
    if (j.contains("initial")) {
        const auto& init = j.at("initial");
        if (init.contains("v0")) sc.initial.v0 = function_spec_from_json(init.at("v0"));
        sc.initial.S0 = init.value("S0", 0.5);
    }
    if (j.contains("run")) sc.run = j.at("run");
    sc.seed = j.value("seed", 0ULL);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot read scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();

    nlohmann::json j;
    if (path.extension() == ".toml") {
        j = toml_lite::parse(buf.str());
    } else if (path.extension() == ".json") {
        j = nlohmann::json::parse(buf.str(), nullptr, /*allow_exceptions=*/true);
    } else {
        throw validation_error("scenario files must end in .toml or .json");
    }
    Scenario sc = scenario_from_json(j);

    // Validate now: hypotheses bounds, integrator sanity, initial data sign.
    Grid grid = Grid::uniform(sc.n_cells);
    sample_coefficients(sc.coefficients, grid);
    sc.integrator.validate();
    for (double v : sample_initial(sc, grid)) {
        if (v < 0.0) throw validation_error("initial v0 must be nonnegative");
    }
    if (sc.initial.S0 < 0.0) throw validation_error("initial S0 must be nonnegative");
    return sc;
}

std::vector<double> sample_initial(const Scenario& sc, const Grid& grid) {
    return sample(sc.initial.v0, grid);
}

const std::vector<Scenario>& preset_catalog() {
    static const std::vector<Scenario> catalog = [] {
        std::vector<Scenario> list;

        Scenario bilinear;
        bilinear.name = "bilinear-constant";
        bilinear.n_cells = 128;
        bilinear.coefficients = {ConstantFn{1.0}, ConstantFn{1.0}, ConstantKernel{2.0},
                                 ConstantFn{0.0}};
        bilinear.integrator = {.dt = 1e-3, .t_end = 5.0, .scheme = Scheme::imex_cn,
                               .snapshot_every = 500};
        bilinear.initial = {ConstantFn{0.8}, 0.2};
        bilinear.run = {{"V_star", 3.0}};
        bilinear.seed = 1;
        list.push_back(bilinear);

        Scenario quadratic = bilinear;
        quadratic.name = "quadratic-constant";
        quadratic.coefficients.gamma = ConstantFn{1.0};
        quadratic.run = {{"R", 1.0}};
        quadratic.seed = 2;
        list.push_back(quadratic);

        Scenario hetero = quadratic;
        hetero.name = "heterogeneous-gamma";
        // gamma(y) = y: exploratory territory, the steady-state construction
        // is only guaranteed at gamma identically 1.
        hetero.coefficients.gamma = LinearFn{0.0, 1.0};
        hetero.seed = 3;
        list.push_back(hetero);

        Scenario super = quadratic;
        super.name = "superspreader-kernel";
        // Transmission peaked for source strains y near 1.
        super.coefficients.beta =
            SeparableKernel{ConstantFn{1.0}, GaussianFn{4.0, 0.9, 0.15, 0.5}};
        super.initial = {GaussianFn{0.6, 0.3, 0.2, 0.2}, 0.5};
        super.seed = 4;
        list.push_back(super);

        Scenario probe;
        probe.name = "blowup-probe";
        probe.n_cells = 128;
        probe.coefficients = {ConstantFn{0.01}, ConstantFn{0.2},
                              GaussianKernel{5.0, 0.05, 0.05}, ConstantFn{2.0}};
        probe.integrator = {.dt = 1e-4, .t_end = 0.5, .scheme = Scheme::imex_euler,
                            .snapshot_every = 100};
        probe.initial = {GaussianFn{30.0, 0.5, 0.05, 0.1}, 1.0};
        probe.run = {{"t_max", 0.5}, {"dt_base", 1e-4}, {"record_every", 10}};
        probe.seed = 5;
        list.push_back(probe);

        return list;
    }();
    return catalog;
}

const Scenario* find_preset(std::string_view name) {
    for (const Scenario& sc : preset_catalog()) {
        if (sc.name == name) return &sc;
    }
    return nullptr;
}

} // namespace strainsis
