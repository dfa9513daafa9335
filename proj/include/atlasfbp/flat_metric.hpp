#pragma once

#include <variant>
#include <vector>

#include "atlasfbp/mass_profile.hpp"

namespace atlas {

/// Either an empirical measure or the measure dF of a cumulative mass function.
using Measure = std::variant<PointMeasure, MassProfile>;

/// Leftmost point carrying mass (+inf for the zero measure).
double support_left(const Measure& m);

/// Masses of m against the hat functions of g: w_j = int hat_j dm.
/// Exact for piecewise linear test functions on g. Mass right of x_hi is dropped.
std::vector<double> node_masses(const Measure& m, const Grid& g);

/// max sum_j f_j w_j over |f_j| <= M, |f_{j+1} - f_j| <= L h, M + L <= 1,
/// with f pinned to zero at the last node.
double flat_lp(const std::vector<double>& w, double h);

/// Same program at a fixed sup bound M (Lipschitz budget 1 - M).
double flat_lp_fixed(const std::vector<double>& w, double h, double M);

/// Bounded-Lipschitz distance restricted to test functions supported in (-inf, r].
/// Discretized on nodes of spacing h_lp ending at r.
double d_flat_r(const Measure& mu, const Measure& nu, double r, double h_lp = 0.01);

struct DStar {
    double value = 0.0;
    double truncation_error = 0.0;
};

/// sum_{r=1}^{r_max} 2^{-r} min(1, d_flat_r(mu, nu, r)).
DStar d_star(const Measure& mu, const Measure& nu, int r_max, double h_lp = 0.01);

}  // namespace atlas
