#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "atlasfbp/boundary.hpp"
#include "atlasfbp/heat_semigroup.hpp"
#include "atlasfbp/mass_profile.hpp"

namespace atlas {

struct SplitConfig {
    double delta = 1e-3;
    double Delta = 0.1;
    std::optional<double> t0;  // defaults to 2 delta
    double T = 0.25;
    Grid grid;
    bool run_lower = true;
    int snapshot_every = 0;  // steps between stored snapshots; 0 keeps only t = 0 and t = T
    std::vector<double> gap_probes;  // r values at which the envelope gap is tracked
    Exec exec = Exec::parallel;
    KernelSpec kernel;

    int steps() const;
    double step_size() const { return T / steps(); }
    double ladder_switch() const { return t0 ? *t0 : 2.0 * step_size(); }
};

/// Window [-0.5 - 8 sqrt T, x_needed + 8 sqrt T] where v0(x_needed) = 2T.
Grid default_solver_grid(const std::function<double(double)>& v0, double T, double h);

struct UpperStep {
    MassProfile profile;
    double gamma = 0.0;
};

struct LowerStep {
    MassProfile profile;
    double ladder_increment = 0.0;
};

/// Ladder increment of step n >= 1.
double ladder_increment(int n, double delta, double Delta, double t0);

/// Analytic bracket Delta + t0 + delta + T exp(-Delta^5 / delta).
double ladder_bound(double Delta, double t0, double delta, double T);

UpperStep step_upper(const MassProfile& v, double delta, Exec exec = Exec::parallel,
                     const KernelSpec& spec = {});
LowerStep step_lower(const MassProfile& v, double Delta, double delta, int n, double t0,
                     Exec exec = Exec::parallel, const KernelSpec& spec = {});

struct Snapshot {
    int step = 0;
    double t = 0.0;
    MassProfile upper;
    MassProfile lower;  // empty values when the lower scheme is off
};

struct EnvelopePair {
    SplitConfig config;
    BoundaryPath sigma_hat;            // cut locations of the upper scheme, sigma(0) = 0
    std::vector<double> ladder;        // ladder[n], n = 0..steps
    std::vector<double> gap_sup;       // max_r (lower - upper) bracket gap at each step
    std::vector<std::vector<double>> gap_probe;  // gap_probe[n][k] at config.gap_probes[k]
    std::vector<Snapshot> snapshots;
    int certificate_violations = 0;    // steps where upper <= lower mod Delta + ladder failed
    double worst_certificate_gap = 0.0;
    double max_rho_excess = 0.0;       // max_n gamma_n - gamma^{4 delta}(previous upper)
    double max_sigma_jump = 0.0;
    std::vector<std::string> warnings;

    double mass_absorbed(int n) const { return n * config.step_size(); }
};

/// Iterate both envelope schemes to T.
EnvelopePair run(const MassProfile& v0, const SplitConfig& config);

/// Left edge of the support: one cell left of the first node with v > eps,
/// refined by linear extrapolation. Returns nullopt when v vanishes on the grid.
std::optional<double> boundary_from_profile(const MassProfile& v, double eps = -1.0);

struct ErrorCertificate {
    double measured_gap = 0.0;
    double analytic_bound = 0.0;
    double tolerance = 0.0;  // 3h sup v
    bool within = true;
};

/// sup_n of the lower-minus-upper bracket gap at r (r = +inf takes the sup over
/// all nodes) against the analytic ladder bound.
ErrorCertificate error_certificate(const EnvelopePair& pair, double r);

}  // namespace atlas
