#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "atlasfbp/errors.hpp"
#include "atlasfbp/initial_conditions.hpp"

using namespace atlas;

TEST_SUITE("initial_conditions") {

TEST_CASE("descriptors") {
    auto lin = InitialDescriptor::linear(2.0);
    CHECK(lin.v0(-1.0) == 0.0);
    CHECK(lin.v0(1.5) == 3.0);
    CHECK(lin.inverse(3.0) == doctest::Approx(1.5));

    auto pw = InitialDescriptor::power(2.0, 1.5);
    CHECK(pw.v0(4.0) == doctest::Approx(16.0));
    CHECK(pw.inverse(16.0) == doctest::Approx(4.0));

    auto tab = InitialDescriptor::table({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0});
    CHECK(tab.v0(1.5) == doctest::Approx(2.5));
    CHECK(tab.inverse(2.5) == doctest::Approx(1.5));
    CHECK(tab.v0(3.0) == doctest::Approx(7.0));  // last slope continues

    CHECK_THROWS_AS(InitialDescriptor::linear(-1.0).validate(), ConfigError);
    CHECK_THROWS_AS(InitialDescriptor::table({0.0, 1.0, 0.5}, {0.0, 1.0, 2.0}).validate(), ConfigError);
    CHECK_THROWS_AS(InitialDescriptor::table({0.0, 1.0}, {0.0, -1.0}).validate(), ConfigError);
}

TEST_CASE("floor_holds") {
    Grid g = Grid::covering(-1.0, 3.0, 0.01);
    auto d = InitialDescriptor::power(1.0, 2.0);
    CHECK(d.floor_holds(g));
    d.lambda0_floor = 0.5;
    CHECK_FALSE(d.floor_holds(g));  // x^2 < x/2 near 0
    auto lin = InitialDescriptor::linear(2.0);
    lin.lambda0_floor = 2.0;
    CHECK(lin.floor_holds(g));
    lin.lambda0_floor = 2.5;
    CHECK_FALSE(lin.floor_holds(g));
}

TEST_CASE("Poisson sampling") {
    auto d = InitialDescriptor::linear(2.0);
    auto x = sample_ppp(d, 1000, 17, 3.0);
    CHECK(std::is_sorted(x.begin(), x.end()));
    CHECK(x.front() >= 0.0);
    CHECK(x.back() <= 3.0);
    // count ~ Poisson(6000)
    CHECK(std::abs(static_cast<double>(x.size()) - 6000.0) < 4.0 * std::sqrt(6000.0));
    CHECK(sample_ppp(d, 1000, 17, 3.0) == x);
    CHECK(sample_ppp(d, 1000, 18, 3.0) != x);
    CHECK(coverage_count(d, 1000, 3.0) == 6000);
}

TEST_CASE("deterministic lattice") {
    auto d = InitialDescriptor::linear(2.0);
    auto x = sample_deterministic([&](double m) { return d.inverse(m); }, 10, 5);
    REQUIRE(x.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(x[i] == doctest::Approx(i / 20.0));
}

TEST_CASE("tail recipe constants") {
    // tests/oracles/tail_constants.py
    TailConstants t = tail_constants(InitialDescriptor::linear(2.0), 0.0);
    CHECK(t.alpha == doctest::Approx(1.0));
    CHECK(t.a == doctest::Approx(std::exp(1.0) - 1.0));
    CHECK(t.C == doctest::Approx(5.57494152476088));
    CHECK(t.c == doctest::Approx(1.0));
}

TEST_CASE("Wilson interval") {
    auto [lo, hi] = wilson_interval(0, 100);
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(0.03699).epsilon(1e-3));
    auto [l2, h2] = wilson_interval(50, 100);
    CHECK(l2 == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(h2 == doctest::Approx(0.5962).epsilon(1e-3));
}

TEST_CASE("tail bound check") {
    auto d = InitialDescriptor::linear(2.0);
    TailConstants t = tail_constants(d, 0.0);
    InitialSampler ppp = [&](int n, std::uint64_t seed) { return sample_ppp(d, n, seed, 4.0); };
    TailBoundReport good = check_tail_bound(ppp, {10, 100}, 0.0, t.C, t.c, 200);
    CHECK(good.pass);
    CHECK(good.trials == 200);
    CHECK(good.cells.size() == 2 * 4 * 6);  // j = 0..3

    // ten times the mass piled into [0, 1)
    InitialSampler heavy = [](int n, std::uint64_t) {
        std::vector<double> x;
        for (int k = 0; k < 10 * n; ++k) x.push_back((k + 0.5) / (10.0 * n));
        return x;
    };
    TailBoundReport bad = check_tail_bound(heavy, {10, 100}, 0.0, t.C, t.c, 100);
    CHECK_FALSE(bad.pass);
}

}  // TEST_SUITE
