#include <doctest.h>

#include <cmath>

#include "atlasfbp/errors.hpp"
#include "atlasfbp/initial_conditions.hpp"
#include "atlasfbp/mass_profile.hpp"
#include "helpers.hpp"

using namespace atlas;

TEST_SUITE("mass_profile") {

TEST_CASE("grid construction and validation") {
    Grid g = Grid::covering(-1.0, 1.0, 0.1);
    CHECK(g.count == 21);
    CHECK(g.x_hi() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.x(g.count - 1) == g.x_lo + (g.count - 1) * g.h);
    CHECK_THROWS_AS(Grid(0.0, 0.0, 10), ConfigError);
    CHECK_THROWS_AS(Grid(0.0, 0.1, 1), ConfigError);
    CHECK_THROWS_AS(Grid::covering(1.0, 1.0, 0.1), ConfigError);
}

TEST_CASE("tail models integrate and smooth in closed form") {
    TailModel lin = TailModel::linear(1.0, 2.0);
    CHECK(lin.integral(0.0, 1.0) == doctest::Approx(2.0));
    TailModel sq = TailModel::power(1.0, 2.0);
    CHECK(sq.integral(1.0, 2.0) == doctest::Approx(7.0 / 3.0));
    // E[(x + W_d)^2] = x^2 + d
    TailModel s = sq.smoothed(0.3);
    CHECK(s.eval(1.5) == doctest::Approx(2.25 + 0.3));
    CHECK_THROWS_AS(TailModel::power(1.0, 1.5).smoothed(0.1), ConfigError);
}

TEST_CASE("integral_left") {
    Grid g = Grid::covering(-1.0, 2.0, 0.01);
    MassProfile v = testing::ramp(g, 1.0);
    CHECK(integral_left(v, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(integral_left(v, 3.0) == doctest::Approx(4.5).epsilon(1e-10));  // through the tail

    MassProfile z = MassProfile::sampled(g, [](double) { return 0.0; });
    CHECK(integral_left(z, 0.3) == 0.0);
    CHECK(integral_left(z, 7.0) == 0.0);

    SUBCASE("random monotone profile against a refined Riemann sum") {
        MassProfile r = testing::random_monotone(g, 11);
        const int refine = 100;
        double fine = 0.0, hf = g.h / refine;
        for (double x = g.x_lo + 0.5 * hf; x < 0.7; x += hf) fine += r(x) * hf;
        CHECK(std::abs(integral_left(r, 0.7) - fine) < 1e-6);
    }
    SUBCASE("domain errors") {
        MassProfile t = v;
        t.tail.valid_to = 2.5;
        CHECK_THROWS_AS(integral_left(t, 3.0), DomainError);
        CHECK_THROWS_AS(integral_left(v, std::nan("")), DomainError);
    }
}

TEST_CASE("gamma_quantile") {
    Grid g = Grid::covering(-1.0, 2.0, 0.01);
    CHECK(gamma_quantile(testing::ramp(g, 1.0), 0.02) == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(gamma_quantile(testing::ramp(g, 2.0), 0.01) == doctest::Approx(0.1).epsilon(1e-10));

    MassProfile r = testing::random_monotone(g, 5);
    double lo = g.x_lo, hi = g.x_hi();
    const double hf = g.h / 100;
    auto fine_integral = [&](double b) {
        double s = 0.0;
        for (double x = g.x_lo + 0.5 * hf; x < b; x += hf) s += r(x) * hf;
        return s;
    };
    for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        (fine_integral(mid) < 0.05 ? lo : hi) = mid;
    }
    CHECK(std::abs(gamma_quantile(r, 0.05) - lo) <= g.h);

    Grid small = Grid::covering(-1.0, 1.0, 0.01);
    CHECK_THROWS_AS(gamma_quantile(testing::ramp(small, 1.0), 0.6), OverflowError);
}

TEST_CASE("cut") {
    Grid g = Grid::covering(-1.0, 2.0, 0.01);
    MassProfile v = testing::ramp(g, 1.0);
    CutResult c = cut_with_gamma(v, 0.02);
    CHECK(c.gamma == doctest::Approx(0.2).epsilon(1e-10));
    for (std::size_t i = 0; i < g.count; ++i) {
        double x = g.x(i);
        if (x < 0.2 - g.h) CHECK(c.profile.values[i] == 0.0);
        if (x > 0.2 + g.h) CHECK(c.profile.values[i] == v.values[i]);
    }
    CHECK(cumulative(v).back() - cumulative(c.profile).back() == doctest::Approx(0.02).epsilon(1e-12));

    MassProfile same = cut(v, 0.0);
    CHECK(same.values == v.values);

    for (std::uint64_t s = 0; s < 50; ++s) {
        MassProfile r = testing::random_monotone(g, 100 + s);
        double delta = 0.1 * (s + 1) / 50.0;
        CutResult cr = cut_with_gamma(r, delta);
        CHECK(std::abs(cumulative(r).back() - cumulative(cr.profile).back() - delta) < 1e-8);
        CHECK(cr.profile.nonnegative());
        // cut/gamma consistency right of gamma
        Antiderivative A(r), B(cr.profile);
        double tol = 2.0 * g.h * r.sup();
        for (double x = cr.gamma; x < g.x_hi(); x += 0.137)
            CHECK(std::abs(B(x) - std::max(0.0, A(x) - delta)) <= tol);
    }
}

TEST_CASE("cut_band") {
    Grid g = Grid::covering(-1.0, 2.0, 0.001);
    MassProfile v = testing::ramp(g, 1.0);
    MassProfile b = cut_band(v, 0.02, 0.02);
    const double hi = std::sqrt(0.08);
    for (std::size_t i = 0; i < g.count; ++i) {
        double x = g.x(i);
        if (x > 0.2 + g.h && x < hi - g.h) CHECK(b.values[i] == 0.0);
        if (x < 0.2 - g.h || x > hi + g.h) CHECK(b.values[i] == v.values[i]);
    }
    CHECK(std::abs(cumulative(v).back() - cumulative(b).back() - 0.02) < 1e-8);

    Grid gc = Grid::covering(-1.0, 2.0, 0.01);
    for (std::uint64_t s = 0; s < 20; ++s) {
        MassProfile r = testing::random_monotone(gc, 300 + s);
        auto cert = precede_mod(cut_band(r, 0.3, 0.05), cut_band(r, 0.1, 0.05), 0.0, 1e-9);
        CHECK(cert.holds);
    }
}

TEST_CASE("precede_mod") {
    Grid g = Grid::covering(-1.0, 2.0, 0.01);
    MassProfile u = testing::ramp(g, 1.0);
    CHECK(precede_mod(u, u, 0.0).holds);
    MassProfile v = cut(u, 0.02);
    CHECK(precede_mod(v, u, 0.02).holds);
    CHECK(precede_mod(u, v, 0.0).holds);
    CHECK_FALSE(precede_mod(v, u, 0.0, 1e-9).holds);

    SUBCASE("moving a parcel of integral rightward") {
        MassProfile src = testing::random_monotone(g, 9);
        MassProfile moved = src;
        const double m = 0.05;
        auto hat = [](double x, double c) { return std::max(0.0, 1.0 - std::abs(x - c) / 0.05); };
        // each hat has integral 0.05 = m
        for (std::size_t i = 0; i < g.count; ++i) {
            src.values[i] += hat(g.x(i), 0.45);
            moved.values[i] += hat(g.x(i), 1.05);
        }
        CHECK(precede_mod(src, moved, 0.0, 1e-12).holds);
        CHECK(precede_mod(moved, src, m, 1e-12).holds);
        CHECK_FALSE(precede_mod(moved, src, 0.5 * m, 1e-12).holds);
    }
    SUBCASE("grid mismatch") {
        MassProfile w = testing::ramp(Grid::covering(-1.0, 2.0, 0.02), 1.0);
        CHECK_THROWS_AS(precede_mod(u, w, 0.0), UsageError);
    }
}

TEST_CASE("cdf_of_points") {
    Grid g = Grid::covering(-0.5, 3.0, 0.01);
    const int n = 50;
    std::vector<double> atoms;
    for (int i = 1; i <= n; ++i) atoms.push_back(static_cast<double>(i) / n);
    MassProfile F = cdf_of_points(PointMeasure(atoms, 1.0 / n), g);
    CHECK(std::abs(F(1.0) - 1.0) <= 1.0 / n);
    CHECK(F.nondecreasing());

    MassProfile Z = cdf_of_points(PointMeasure({}, 1.0), g);
    CHECK(Z.sup() == 0.0);

    auto d = InitialDescriptor::linear(2.0);
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto xs = sample_ppp(d, 10000, seed, 3.5);
        MassProfile E = cdf_of_points(PointMeasure(xs, 1e-4), g);
        double sup = 0.0;
        for (std::size_t i = 0; i < g.count; ++i)
            if (g.x(i) >= 0.0 && g.x(i) <= 3.0) sup = std::max(sup, std::abs(E.values[i] - 2.0 * g.x(i)));
        good += sup <= 0.05;
    }
    CHECK(good >= 95);
}

}  // TEST_SUITE
