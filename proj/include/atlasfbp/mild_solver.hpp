#pragma once

#include <functional>
#include <vector>

#include "atlasfbp/boundary.hpp"
#include "atlasfbp/heat_semigroup.hpp"
#include "atlasfbp/mass_profile.hpp"

namespace atlas {

/// v(x, t) = S_t v0(x) - int_0^t p_{t-s}(sigma_s - x) ds at the nodes of grid.
MassProfile duhamel_profile(const MassProfile& v0, const BoundaryPath& sigma, double t,
                            const Grid& grid, Exec exec = Exec::parallel);
MassProfile duhamel_profile(const InitialSmoother& s0, const BoundaryPath& sigma, double t,
                            const Grid& grid, Exec exec = Exec::parallel);

/// Restart from the profile at tau: S_{t-tau} v_tau - int_tau^t p_{t-s}(sigma_s - x) ds.
MassProfile restart_profile(const MassProfile& v_tau, const BoundaryPath& sigma, double tau, double t,
                            const Grid& grid, Exec exec = Exec::parallel);

struct MildOptions {
    double bracket_width = 5.0;  // in units of sqrt(dt)
    int max_expansions = 4;
    int max_iterations = 200;
};

/// March t_m = m T / steps, solving v(sigma_m, t_m) = 0 for sigma_m with the
/// earlier path frozen and the last segment linear.
BoundaryPath solve_boundary(const MassProfile& v0, double T, int steps, const MildOptions& opt = {});

/// Profiles along a path at the given times.
struct SnapshotSeries {
    std::vector<double> times;
    std::vector<MassProfile> profiles;
};

SnapshotSeries mild_snapshots(const MassProfile& v0, const BoundaryPath& sigma,
                              const std::vector<double>& times, const Grid& grid,
                              Exec exec = Exec::parallel);

/// C^2 space-time bump phi = b((x - xc)/wx) b((t - tc)/wt), b(s) = (1 - s^2)^3 on |s| < 1.
struct Bump {
    double xc, wx, tc, wt;

    double phi(double x, double t) const;
    double phi_t(double x, double t) const;
    double phi_xx(double x, double t) const;
    /// L1 norm of phi_t, in closed form.
    double phi_t_l1() const;
};

/// 3 x 3 lattice of bumps around x_center with time centers inside (0, T).
std::vector<Bump> default_battery(double T, double x_center = 0.0, double wx = 0.1);

/// Largest phi_t L1 norm over the battery; residual thresholds are relative to it.
double battery_scale(const std::vector<Bump>& battery);

struct ResidualReport {
    double weak_form_max = 0.0;
    double complementarity = 0.0;
    int test_count = 0;
    std::vector<double> per_test;
};

/// max over the battery of | -int int (phi_t + phi_xx / 2) v + int phi(., 0) v0 ... |, i.e. the
/// defect of  -int<phi_t + phi_xx/2, v> dt = <phi(., 0), v0> - int phi d beta.
/// Integrals use the trapezoid rule on the snapshot grid in x and t.
ResidualReport weak_form_residual(const SnapshotSeries& v, const BoundaryPath& beta,
                                  const MassProfile& v0, const std::vector<Bump>& battery);
ResidualReport weak_form_residual(const SnapshotSeries& v, const BoundaryHistogram& beta,
                                  const MassProfile& v0, const std::vector<Bump>& battery);

/// int v d beta = int v(sigma_t, t) dt by the trapezoid rule over the snapshot times.
double complementarity(const SnapshotSeries& v, const BoundaryPath& beta);

}  // namespace atlas
