#pragma once

#include <cmath>
#include <vector>

#include "atlasfbp/mass_profile.hpp"
#include "atlasfbp/rng.hpp"

namespace testing {

inline atlas::MassProfile ramp(const atlas::Grid& g, double slope, double x0 = 0.0) {
    return atlas::MassProfile::sampled(g, [&](double x) { return slope * std::max(x - x0, 0.0); },
                                       atlas::TailModel::linear(-slope * x0, slope));
}

// Nondecreasing profile, zero left of a random start, with a random piecewise constant density.
inline atlas::MassProfile random_monotone(const atlas::Grid& g, std::uint64_t seed) {
    atlas::CounterRng rng(seed);
    double x0 = g.x_lo + 0.3 * (g.x_hi() - g.x_lo) * rng.uniform(0, 0);
    std::vector<double> dens(16);
    for (std::size_t k = 0; k < dens.size(); ++k) dens[k] = 0.2 + 3.0 * rng.uniform(1, k);
    double cell = (g.x_hi() - x0) / 16.0;
    std::vector<double> y(g.count, 0.0);
    for (std::size_t i = 1; i < g.count; ++i) {
        double xm = g.x(i) - 0.5 * g.h;
        double rate = xm > x0 ? dens[std::min<std::size_t>(15, static_cast<std::size_t>((xm - x0) / cell))] : 0.0;
        y[i] = y[i - 1] + rate * g.h;
    }
    double last = (y.back() - y[g.count - 2]) / g.h;
    double c0 = y.back() - last * g.x_hi();
    return atlas::MassProfile(g, std::move(y), atlas::TailModel::linear(c0, last));
}

}  // namespace testing
