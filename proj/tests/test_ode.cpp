#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "strainsis/dynamics.hpp"
#include "strainsis/errors.hpp"
#include "strainsis/ode.hpp"
#include "strainsis/operators.hpp"
#include "support.hpp"

using namespace strainsis;

namespace {

// Composite Simpson, used as an independent quadrature oracle below.
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return acc * h / 3.0;
}

} // namespace

TEST_CASE("single strain rhs reduces to -rho I + beta S I^(1+gamma)") {
    OdeSystem sys = OdeSystem::single_strain(1.3, 2.1, 1.0);
    OdeState s{{0.7}, 1.4, 0.0};
    OdeDerivative d = ode_rhs(s, sys);
    const double expected = -1.3 * 0.7 + 2.1 * 1.4 * 0.7 * 0.7;
    CHECK(d.dI[0] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(d.dS == doctest::Approx(-expected).epsilon(1e-14));
}

TEST_CASE("rhs vanishes on the disease-free state") {
    OdeSystem sys = OdeSystem::single_strain(1.0, 2.0, 0.5);
    OdeState s{{0.0}, 3.0, 0.0};
    OdeDerivative d = ode_rhs(s, sys);
    CHECK(d.dI[0] == 0.0);
    CHECK(d.dS == 0.0);
}

TEST_CASE("rhs components cancel: conservation at the derivative level") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 4;
        OdeSystem sys;
        sys.n_strains = n;
        sys.d_matrix = DenseMatrix(n, n);
        sys.beta = DenseMatrix(n, n);
        std::uniform_real_distribution<double> unit(0.0, 1.5);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                sys.d_matrix(i, j) = unit(rng);
                sys.beta(i, j) = unit(rng);
            }
        }
        sys.rho = testsupport::random_positive_vector(rng, n, 0.0, 1.0);
        sys.gamma = testsupport::random_positive_vector(rng, n, 0.0, 1.0);
        OdeState s;
        s.I = testsupport::random_positive_vector(rng, n, 0.0, 2.0);
        s.S = unit(rng);
        OdeDerivative d = ode_rhs(s, sys);
        double total = d.dS;
        for (double v : d.dI) total += v;
        CHECK(std::abs(total) < 1e-14);
    }
}

TEST_CASE("rho = beta = 0 gives a constant trajectory") {
    OdeSystem sys = OdeSystem::single_strain(0.0, 0.0, 1.0);
    OdeState s{{0.8}, 0.4, 0.0};
    auto traj = ode_integrate(s, sys, 1e-2, 2.0, OdeMethod::rk4);
    CHECK(traj.back().I[0] == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(traj.back().S == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("symmetric strains stay symmetric") {
    OdeSystem sys;
    sys.n_strains = 2;
    sys.d_matrix = DenseMatrix(2, 2);
    sys.d_matrix(0, 1) = sys.d_matrix(1, 0) = 0.3;
    sys.rho = {1.0, 1.0};
    sys.beta = DenseMatrix(2, 2);
    sys.beta(0, 0) = sys.beta(0, 1) = sys.beta(1, 0) = sys.beta(1, 1) = 1.5;
    sys.gamma = {1.0, 1.0};
    OdeState s{{0.4, 0.4}, 1.2, 0.0};
    auto traj = ode_integrate(s, sys, 1e-3, 3.0, OdeMethod::rk4);
    for (const auto& st : traj.states) {
        CHECK(st.I[0] == doctest::Approx(st.I[1]).epsilon(1e-13));
    }
}

TEST_CASE("conservation along bounded rk4 trajectories") {
    OdeSystem sys = OdeSystem::single_strain(1.0, 2.0, 1.0);
    OdeState s{{0.8}, 0.2, 0.0};
    auto traj = ode_integrate(s, sys, 1e-3, 5.0, OdeMethod::rk4);
    CHECK(traj.max_conservation_drift < 1e-12);
}

TEST_CASE("trajectory converges to the stable equilibrium on the conservation line") {
    // rho=1, beta=2, gamma=1, P=2: S V = 1/2 and V + 0.5/V = 2 give
    // V = 1 +- 1/sqrt(2); the upper root is the attracting one.
    OdeSystem sys = OdeSystem::single_strain(1.0, 2.0, 1.0);
    OdeState s{{0.5}, 1.5, 0.0};
    auto traj = ode_integrate(s, sys, 1e-3, 40.0, OdeMethod::rk4, 1e-10, 1000);
    const double V_expected = 1.0 + 1.0 / std::sqrt(2.0);
    CHECK(traj.back().I[0] == doctest::Approx(V_expected).epsilon(1e-7));
    CHECK(traj.back().S == doctest::Approx(2.0 - V_expected).epsilon(1e-6));

    auto eq = ode_endemic_equilibria(sys, 2.0);
    REQUIRE(eq.size() == 2);
    CHECK(eq[1].first == doctest::Approx(V_expected).epsilon(1e-12));
}

TEST_CASE("critical population size and equilibrium structure") {
    OdeSystem sys = OdeSystem::single_strain(1.0, 1.0, 1.0);
    CHECK(critical_population_size(sys) == doctest::Approx(2.0).epsilon(1e-14));

    // Scan oracle: minimize V + (rho/beta) V^-gamma numerically.
    double best = 1e300;
    for (int k = 1; k < 40000; ++k) {
        const double V = 4.0 * k / 40000.0;
        best = std::min(best, V + 1.0 / V);
    }
    CHECK(critical_population_size(sys) == doctest::Approx(best).epsilon(1e-7));

    auto none = ode_endemic_equilibria(sys, 1.5);
    CHECK(none.empty());

    auto tangent = ode_endemic_equilibria(sys, 2.0);
    REQUIRE(tangent.size() == 1);
    CHECK(tangent[0].first == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tangent[0].second == doctest::Approx(1.0).epsilon(1e-12));

    auto two = ode_endemic_equilibria(sys, 2.5);
    REQUIRE(two.size() == 2);
    CHECK(std::abs(two[0].first - 0.5) < 1e-10);
    CHECK(std::abs(two[0].second - 2.0) < 1e-10);
    CHECK(std::abs(two[1].first - 2.0) < 1e-10);
    CHECK(std::abs(two[1].second - 0.5) < 1e-10);
}

TEST_CASE("bilinear case: equilibrium requires S = rho/beta") {
    OdeSystem sys = OdeSystem::single_strain(1.0, 2.0, 0.0);
    auto eq = ode_endemic_equilibria(sys, 3.0);
    REQUIRE(eq.size() == 1);
    CHECK(eq[0].second == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eq[0].first == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(ode_endemic_equilibria(sys, 0.4).empty());
}

TEST_CASE("equilibria are stationary under integration") {
    OdeSystem sys = OdeSystem::single_strain(1.0, 1.0, 1.0);
    for (auto [V, S] : ode_endemic_equilibria(sys, 2.5)) {
        OdeState s{{V}, S, 0.0};
        auto traj = ode_integrate(s, sys, 1e-3, 10.0, OdeMethod::rk4, 1e-10, 1000);
        CHECK(std::abs(traj.back().I[0] - V) < 1e-8);
        CHECK(std::abs(traj.back().S - S) < 1e-8);
    }
}

TEST_CASE("endemic state for fixed susceptible size") {
    OdeSystem sys = OdeSystem::single_strain(1.0, 2.0, 1.0);
    CHECK(ode_endemic_for_S(sys, 1.0).first == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ode_endemic_for_S(sys, 0.5).first == doctest::Approx(1.0).epsilon(1e-14));
    OdeSystem eq = OdeSystem::single_strain(1.7, 1.7, 1.0);
    for (double S : {0.25, 1.0, 4.0}) {
        CHECK(ode_endemic_for_S(eq, S).first == doctest::Approx(1.0 / S).epsilon(1e-13));
    }
    CHECK_THROWS_AS(ode_endemic_for_S(sys, 0.0), validation_error);
}

TEST_CASE("blow-up time closed forms") {
    auto T = ode_blowup_exact(0.0, 1.0, 2.0, 1.0);
    REQUIRE(T.has_value());
    CHECK(*T == 1.0); // v = 1/(1-t)

    CHECK(!ode_blowup_exact(1.0, 1.0, 2.0, 0.5).has_value()); // decay
    CHECK(!ode_blowup_exact(1.0, 1.0, 2.0, 1.0).has_value()); // marginal case

    auto T2 = ode_blowup_exact(1.0, 1.0, 2.0, 2.0);
    REQUIRE(T2.has_value());
    CHECK(*T2 == doctest::Approx(std::log(2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(ode_blowup_exact(1.0, 1.0, 1.0, 2.0), validation_error);
    CHECK_THROWS_AS(ode_blowup_exact(1.0, 1.0, 0.5, 2.0), validation_error);
}

TEST_CASE("blow-up time agrees with an independent quadrature oracle") {
    // T = integral_{v0}^inf dv / (beta v^p - rho v); substituting w = 1/v for
    // p = 3 gives T = int_0^{1/v0} w / (beta - rho w^2) dw.
    const double rho = 0.8, beta = 1.3, v0 = 1.5;
    const double T_quad =
        simpson([&](double w) { return w / (beta - rho * w * w); }, 0.0, 1.0 / v0, 20000);
    auto T = ode_blowup_exact(rho, beta, 3.0, v0);
    REQUIRE(T.has_value());
    CHECK(*T == doctest::Approx(T_quad).epsilon(1e-10));
}

TEST_CASE("adaptive integration aborts near the exact blow-up time") {
    // With S pinned at 1 the single-strain system is dv/dt = beta v^2.
    OdeSystem sys = OdeSystem::single_strain(0.0, 1.0, 1.0);
    OdeState s{{1.0}, 1.0, 0.0};
    auto traj = ode_integrate(s, sys, 1e-3, 10.0, OdeMethod::adaptive, 1e-10, 100000, /*pin_S=*/1.0);
    CHECK(traj.aborted);
    CHECK(traj.back().t == doctest::Approx(1.0).epsilon(1e-3));

    // rho > 0 variant: T = ln 2.
    OdeSystem sys2 = OdeSystem::single_strain(1.0, 1.0, 1.0);
    OdeState s2{{2.0}, 1.0, 0.0};
    auto traj2 = ode_integrate(s2, sys2, 1e-3, 10.0, OdeMethod::adaptive, 1e-10, 100000, /*pin_S=*/1.0);
    CHECK(traj2.aborted);
    CHECK(traj2.back().t == doctest::Approx(std::log(2.0)).epsilon(1e-3));
}

TEST_CASE("rk4 beyond the stiff stability limit aborts instead of emitting NaNs") {
    Grid g = Grid::uniform(48);
    CoefficientSpec spec;
    spec.gamma = ConstantFn{1.0};
    auto c = sample_coefficients(spec, g);
    OdeSystem sys = ode_system_from_pde(c, g);
    OdeState s0;
    s0.I.assign(48, 0.01);
    s0.I[10] = 0.05; // rough profile, excites the stiff mutation modes
    s0.S = 0.5;
    auto traj = ode_integrate(s0, sys, 1e-3, 10.0, OdeMethod::rk4);
    CHECK(traj.aborted);
    CHECK(traj.abort_reason.find("non-finite") != std::string::npos);
    for (const OdeState& s : traj.states) {
        for (double v : s.I) CHECK(std::isfinite(v));
    }
}

TEST_CASE("pde semi-discretization maps exactly onto the finite-strain system") {
    std::mt19937_64 rng(41);
    Grid g = Grid::uniform(24);
    auto c = sample_coefficients(testsupport::random_smooth_coefficients(rng, 1.0), g);
    OdeSystem sys = ode_system_from_pde(c, g);

    auto v = testsupport::random_positive_vector(rng, 24);
    const double S = 0.7;
    // PDE right-hand side for the density v.
    OperatorMatrix diff = assemble_diffusion(c, g);
    auto pde_rhs = diff.a.apply(v);
    auto inf = infection_term(v, S, c, g);
    for (int i = 0; i < 24; ++i) pde_rhs[i] += -c.rho[i] * v[i] + inf[i];

    // ODE right-hand side for the per-cell populations I = h v.
    OdeState s;
    s.I.resize(24);
    for (int i = 0; i < 24; ++i) s.I[i] = g.h * v[i];
    s.S = S;
    OdeDerivative d = ode_rhs(s, sys);
    for (int i = 0; i < 24; ++i) {
        CHECK(d.dI[i] == doctest::Approx(g.h * pde_rhs[i]).epsilon(1e-10));
    }
}
