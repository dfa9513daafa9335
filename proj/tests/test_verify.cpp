#include <doctest.h>

#include <cmath>

#include "atlasfbp/errors.hpp"
#include "atlasfbp/heat_semigroup.hpp"
#include "atlasfbp/initial_conditions.hpp"
#include "atlasfbp/verify.hpp"
#include "helpers.hpp"

using namespace atlas;

TEST_SUITE("verify") {

TEST_CASE("self-similar coefficient") {
    // tests/oracles/selfsimilar.py (scipy solve_ivp + brentq)
    const std::pair<double, double> frozen[] = {
        {0.5, 1.3744038502255886}, {1.0, 0.6120031809624809}, {2.0, 0.0},
        {3.0, -0.30671304246394937}, {4.0, -0.5060544689891807},
    };
    for (auto [lambda, a] : frozen) {
        CHECK(selfsimilar_boundary_closed_form(lambda) == doctest::Approx(a).epsilon(1e-10));
        CHECK(std::abs(selfsimilar_boundary(lambda) - a) < 1e-8);
    }
    double prev = INFINITY;
    for (double l = 0.5; l <= 6.0; l += 0.5) {
        double a = selfsimilar_boundary_closed_form(l);
        CHECK(a < prev);
        prev = a;
    }
}

TEST_CASE("effective floor and margins") {
    CHECK(effective_floor(1.0) == 1.0);
    CHECK(effective_floor(4.0) == 2.0);
    Grid g = Grid::covering(-0.5, 1.0, 0.01);
    MassProfile v = testing::ramp(g, 2.0, 0.1);
    CHECK(density_floor_margin(v, 0.1, 2.0, 0.9) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(density_floor_margin(v, 0.1, 3.0, 0.9) < -0.5);
    CHECK(density_floor_margin(v, 0.1, 1.0, 0.9) > 0.0);
}

TEST_CASE("mild boundary slope of the stationary solution") {
    Grid g = Grid::covering(-1.0, 3.0, 1e-3);
    InitialSmoother s0(testing::ramp(g, 2.0));
    BoundaryPath zero = BoundaryPath::constant(0.0, 0.1, 4);
    CHECK(mild_boundary_slope(s0, zero, 0.1, 0.01) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("histogram concentration and slab error") {
    BoundaryPath p({0.0, 0.1}, {0.0, 0.05});
    BoundaryHistogram h = path_to_histogram(p, uniform_edges(-0.5, 0.5, 0.01), uniform_edges(0.0, 0.1, 0.01));
    CHECK(beta_concentration(h, p, 2) == doctest::Approx(1.0));
    CHECK(beta_slab_error(h) < 1e-12);
    BoundaryPath far = BoundaryPath::constant(0.4, 0.1);
    CHECK(beta_concentration(h, far, 2) < 0.01);
}

TEST_CASE("compare") {
    auto x = sample_ppp(InitialDescriptor::linear(2.0), 200, 4, 8.0);
    SimConfig c;
    c.n = 200;
    c.T = 0.01;
    c.seed = 4;
    c.checkpoint_times = {0.005, 0.01};
    c.record_stride = 10;
    PathRecord rec = simulate(x, c);

    ComparisonReport self = compare(rec, as_reference(rec), 4);
    CHECK(self.D1 == 0.0);
    CHECK(self.D2 == 0.0);
    CHECK(self.beta_distance == doctest::Approx(0.0).epsilon(1e-12));

    Grid g = Grid::covering(-1.0, 5.0, 0.01);
    PdeReference ref = mild_reference(InitialDescriptor::linear(2.0).profile(Grid::covering(-1.0, 8.0, 1e-3)), 0.01,
                                      20, c.checkpoint_times, g);
    ComparisonReport r = compare(rec, ref, 4, 200, 4);
    CHECK(r.D1 > 0.0);
    CHECK(r.D1 < 0.2);
    CHECK(r.D2 < 0.2);
    CHECK(r.n == 200);

    PdeReference wrong = ref;
    wrong.times = {0.005};
    wrong.measures.resize(1);
    CHECK_THROWS_AS(compare(rec, wrong, 4), UsageError);
}

TEST_CASE("property suite and mutation") {
    SuiteOptions o;
    o.trials = 20;
    o.solver_checks = false;
    SuiteReport clean = property_suite(o);
    CHECK(clean.pass());
    CHECK(clean.entries.size() >= 6);
    for (const auto& e : clean.entries) CHECK(e.trials == 20);

    o.inject_fault = "cut_off_by_one";
    SuiteReport broken = property_suite(o);
    CHECK_FALSE(broken.pass());

    o.inject_fault = "";
    o.trials = 0;
    SuiteReport empty = property_suite(o);
    CHECK(empty.pass());
    for (const auto& e : empty.entries) CHECK(e.trials == 0);

    CHECK_THROWS_AS(cut_for_fault("bogus"), ConfigError);
}

}  // TEST_SUITE
