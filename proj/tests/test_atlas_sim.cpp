#include <doctest.h>

#include <cmath>
#include <numeric>

#include "atlasfbp/atlas_sim.hpp"
#include "atlasfbp/errors.hpp"
#include "atlasfbp/initial_conditions.hpp"

using namespace atlas;

TEST_SUITE("atlas_sim") {

TEST_CASE("leftmost and gaps") {
    std::vector<double> x{0.3, -0.2, 0.5, -0.2};
    auto [i, v] = leftmost(x);
    CHECK(i == 1);
    CHECK(v == -0.2);
    auto g = gaps(x);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(0.5));
    CHECK(g[2] == doctest::Approx(0.2));
    CHECK(gaps(std::vector<double>{1.0}).empty());
}

TEST_CASE("one step moves the leftmost particle by the drift") {
    Ensemble e({0.0, 10.0, 20.0}, 7, 100.0);
    Ensemble f = e;
    StepInfo info = step(e, 1e-4, 50);
    CHECK(info.lead == 0);
    CHECK(info.lead_x == 0.0);
    // same seed, no drift: the difference is exactly n dt on the leader
    step(f, 1e-4, 1);
    CHECK(e.x[0] - f.x[0] == doctest::Approx(49 * 1e-4).epsilon(1e-9));
    CHECK(e.x[1] == f.x[1]);
    CHECK(e.drift_total == doctest::Approx(50 * 1e-4));
}

TEST_CASE("a lone particle drifts at rate n") {
    double mean = 0.0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        SimConfig c;
        c.n = 1;
        c.T = 0.1;
        c.dt = 1e-3;
        c.seed = 1000 + r;
        c.record_stride = 100;
        PathRecord rec = simulate({0.0}, c);
        mean += rec.Y0(0.1);
    }
    mean /= reps;
    // X_T = T + W_T, standard error sqrt(0.1 / 400)
    CHECK(std::abs(mean - 0.1) < 4 * std::sqrt(0.1 / reps));
}

TEST_CASE("boundary histogram receives dt per step") {
    auto x = sample_ppp(InitialDescriptor::linear(2.0), 200, 3, 6.0);
    SimConfig c;
    c.n = 200;
    c.T = 0.05;
    c.dt = 0.05 / 2000;
    c.seed = 3;
    c.beta_t_bins = 10;
    c.checkpoint_times = {0.025, 0.05};
    PathRecord rec = simulate(x, c);
    for (std::size_t j = 0; j < rec.beta_hist.nt(); ++j)
        CHECK(std::abs(rec.beta_hist.slab_mass(j) - rec.beta_hist.t_edges[j + 1]) <= c.dt);
    CHECK(rec.beta_hist.total() == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(rec.drift_total == doctest::Approx(0.05 * 200).epsilon(1e-9));
    REQUIRE(rec.checkpoints.size() == 2);
    CHECK(rec.checkpoints[0].weight == doctest::Approx(1.0 / 200));
    CHECK(rec.steps == 2000);
    CHECK(rec.Y0.times.front() == 0.0);
    CHECK(rec.Y0.values.front() == doctest::Approx(x.front()));
}

TEST_CASE("runs are deterministic across seeds and execution modes") {
    auto x = sample_ppp(InitialDescriptor::linear(2.0), 500, 9, 6.0);
    SimConfig c;
    c.n = 500;
    c.T = 0.02;
    c.seed = 9;
    c.record_stride = 20;
    c.exec = Exec::serial;
    PathRecord a = simulate(x, c);
    c.exec = Exec::parallel;
    PathRecord b = simulate(x, c);
    CHECK(a.Y0.values == b.Y0.values);
    CHECK(a.beta_hist.mass == b.beta_hist.mass);
    c.seed = 10;
    PathRecord d = simulate(x, c);
    CHECK(a.Y0.values != d.Y0.values);
}

TEST_CASE("configuration errors") {
    SimConfig c;
    c.n = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.n = 1;
    c.dt = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.dt = 0.0;
    c.checkpoint_times = {2.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    SimConfig ok;
    CHECK_THROWS_AS(simulate({0.0, NAN}, ok), ConfigError);
}

}  // TEST_SUITE
