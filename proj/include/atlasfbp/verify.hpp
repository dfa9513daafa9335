#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "atlasfbp/atlas_sim.hpp"
#include "atlasfbp/boundary.hpp"
#include "atlasfbp/flat_metric.hpp"
#include "atlasfbp/mass_profile.hpp"
#include "atlasfbp/mild_solver.hpp"

namespace atlas {

/// Coefficient a of the self-similar boundary sigma_t = a sqrt(t) for v0 = lambda x_+,
/// by shooting G'' = G - xi G' from G(a) = 0, G'(a) = 2 to G'(xi_max) = lambda.
double selfsimilar_boundary(double lambda, double xi_max = 12.0);

/// Same coefficient from the closed form 2 a Q(a) + (lambda - 2) phi(a) = 0.
double selfsimilar_boundary_closed_form(double lambda);

/// Continuum reference for a particle run: measures at the checkpoint times and the boundary.
struct PdeReference {
    std::vector<double> times;
    std::vector<Measure> measures;
    BoundaryPath sigma;
    std::optional<BoundaryHistogram> beta;  // defaults to the occupation measure of sigma
};

/// Mild-solver reference: boundary from solve_boundary and Duhamel profiles
/// on g at the given times (v0 itself at t = 0).
PdeReference mild_reference(const MassProfile& v0, double T, int steps, const std::vector<double>& times,
                            const Grid& g);

/// The record itself viewed as a reference; compare(r, as_reference(r)) is zero.
PdeReference as_reference(const PathRecord& record);

struct ComparisonReport {
    double D1 = 0.0;             // sup_t d_star(mu^n_t, mu_t)
    double D2 = 0.0;             // sup_t |Y0(t) - sigma(t)|
    double beta_distance = 0.0;  // sup over time slabs of the flat distance of normalized x-marginals
    int n = 0;
    std::uint64_t seed = 0;
};

ComparisonReport compare(const PathRecord& record, const PdeReference& pde, int r_max, int n = 0,
                         std::uint64_t seed = 0, double h_lp = 0.01);

/// Fraction of histogram mass within `bins` space bins of sigma at each slab midpoint.
double beta_concentration(const BoundaryHistogram& hist, const BoundaryPath& sigma, int bins);

/// max over slab ends of |beta(R x [0, t]) - t|.
double beta_slab_error(const BoundaryHistogram& hist);

/// Floor actually guaranteed by v0 >= lambda0 x_+: the boundary density is 2, so min(lambda0, 2).
double effective_floor(double lambda0);

/// min over node pairs a < b right of sigma (and left of x_max) of
/// v(b) - v(a) - lambda0 (b - a). Nonnegative when the density floor holds.
double density_floor_margin(const MassProfile& v, double sigma, double lambda0, double x_max);

/// Second-order one-sided slope (-3 v(sigma) + 4 v(sigma + s) - v(sigma + 2s)) / 2s
/// of the Duhamel profile at time t.
double mild_boundary_slope(const InitialSmoother& s0, const BoundaryPath& path, double t, double s);

struct SuiteEntry {
    std::string name;
    int trials = 0;
    int violations = 0;
    double worst = 0.0;  // largest certificate gap minus tolerance (or check-specific defect)
};

struct SuiteReport {
    std::vector<SuiteEntry> entries;
    int violations = 0;
    bool pass() const { return violations == 0; }
};

using CutFn = std::function<MassProfile(const MassProfile&, double)>;

/// The library cut, or a deliberately broken one for mutation testing.
CutFn cut_for_fault(const std::string& fault);

struct SuiteOptions {
    std::uint64_t seed = 1;
    int trials = 100;
    std::string inject_fault;  // "" or "cut_off_by_one"
    bool solver_checks = true;
};

/// Ordering-preservation properties of the cut and smoothing operators on
/// randomly generated pairs, plus density-floor, boundary-concentration and
/// residual checks on small solver runs.
SuiteReport property_suite(const SuiteOptions& opt);

}  // namespace atlas
