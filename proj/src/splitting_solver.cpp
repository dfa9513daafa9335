#include "atlasfbp/splitting_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atlasfbp/errors.hpp"

namespace atlas {

int SplitConfig::steps() const {
    if (!(delta > 0.0) || !(T > 0.0)) throw ConfigError("splitting needs delta > 0 and T > 0");
    return std::max(1, static_cast<int>(std::lround(T / delta)));
}

Grid default_solver_grid(const std::function<double(double)>& v0, double T, double h) {
    double target = 2.0 * T;
    double hi = 1.0;
    while (v0(hi) < target) {
        hi *= 2.0;
        if (hi > 1e6) throw ConfigError("initial profile never reaches the absorbed mass 2T");
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        (v0(mid) < target ? lo : hi) = mid;
    }
    double pad = 8.0 * std::sqrt(T);
    double a = -0.5 - pad;
    a = h * std::floor(a / h);  // keep x = 0 on the grid
    return Grid::covering(a, hi + pad, h);
}

double ladder_increment(int n, double delta, double Delta, double t0) {
    double t_prev = (n - 1) * delta;
    if (t_prev < t0) return delta;
    return delta * std::exp(-std::pow(Delta, 5) / delta);
}

double ladder_bound(double Delta, double t0, double delta, double T) {
    return Delta + t0 + delta + T * std::exp(-std::pow(Delta, 5) / delta);
}

namespace {

void require_room(const MassProfile& v, int K) {
    if (v.first_nonzero() <= static_cast<std::size_t>(K))
        throw OverflowError("support reached the left edge of the window; widen the grid");
}

}  // namespace

UpperStep step_upper(const MassProfile& v, double delta, Exec exec, const KernelSpec& spec) {
    MassProfile s = smooth(v, delta, exec, spec);
    CutResult c = cut_with_gamma(s, delta);
    return {std::move(c.profile), c.gamma};
}

LowerStep step_lower(const MassProfile& v, double Delta, double delta, int n, double t0, Exec exec,
                     const KernelSpec& spec) {
    MassProfile s = smooth(v, delta, exec, spec);
    return {cut_band(s, Delta, delta), ladder_increment(n, delta, Delta, t0)};
}

EnvelopePair run(const MassProfile& v0, const SplitConfig& cfg) {
    const int N = cfg.steps();
    const double dl = cfg.step_size();
    const double t0 = cfg.ladder_switch();
    const int K = hat_kernel(dl, cfg.grid.h, cfg.kernel.truncation_radius_sigmas).K;
    if (!v0.grid.same_as(cfg.grid)) throw UsageError("initial profile must live on the solver grid");

    EnvelopePair out;
    out.config = cfg;
    if (cfg.run_lower && !(cfg.Delta > dl))
        out.warnings.push_back("Delta <= delta: band cut overlaps the left cut");
    if (cfg.run_lower && dl >= cfg.Delta / 24.0)
        out.warnings.push_back("delta >= Delta/24: outside the regime of the ordering estimates");
    if (cfg.run_lower && std::pow(cfg.Delta, 5) / dl < 1.0)
        out.warnings.push_back("Delta^5/delta < 1: the post-t0 ladder grows at nearly rate one");

    std::vector<double> ts(static_cast<std::size_t>(N) + 1), sig(ts.size(), 0.0);
    for (int n = 0; n <= N; ++n) ts[static_cast<std::size_t>(n)] = n * dl;
    out.ladder.assign(ts.size(), 0.0);
    out.gap_sup.assign(ts.size(), 0.0);
    out.gap_probe.assign(ts.size(), std::vector<double>(cfg.gap_probes.size(), 0.0));

    MassProfile up = v0;
    MassProfile lo = v0;
    auto record = [&](int n) {
        Snapshot s{n, n * dl, up, cfg.run_lower ? lo : MassProfile{}};
        out.snapshots.push_back(std::move(s));
    };
    record(0);

    for (int n = 1; n <= N; ++n) {
        double prev_gamma4 = gamma_quantile(up, std::min(4.0 * dl, cumulative(up).back()));
        UpperStep us = step_upper(up, dl, cfg.exec, cfg.kernel);
        require_room(us.profile, K);
        up = std::move(us.profile);
        auto ni = static_cast<std::size_t>(n);
        sig[ni] = us.gamma;
        out.max_rho_excess = std::max(out.max_rho_excess, us.gamma - prev_gamma4);
        out.max_sigma_jump = std::max(out.max_sigma_jump, std::abs(sig[ni] - sig[ni - 1]));

        if (cfg.run_lower) {
            LowerStep ls = step_lower(lo, cfg.Delta, dl, n, t0, cfg.exec, cfg.kernel);
            require_room(ls.profile, K);
            lo = std::move(ls.profile);
            out.ladder[ni] = out.ladder[ni - 1] + ls.ladder_increment;

            OrderCertificate c = precede_mod(up, lo, cfg.Delta + out.ladder[ni]);
            if (!c.holds) ++out.certificate_violations;
            out.worst_certificate_gap = std::max(out.worst_certificate_gap, c.worst_gap);
            out.gap_sup[ni] = c.worst_gap + cfg.Delta + out.ladder[ni];
            if (!cfg.gap_probes.empty()) {
                Antiderivative U(up), L(lo);
                for (std::size_t k = 0; k < cfg.gap_probes.size(); ++k)
                    out.gap_probe[ni][k] = L(cfg.gap_probes[k]) - U(cfg.gap_probes[k]);
            }
        } else {
            out.ladder[ni] = out.ladder[ni - 1] + ladder_increment(n, dl, cfg.Delta, t0);
        }
        if ((cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0) || n == N) {
            if (out.snapshots.back().step != n) record(n);
        }
    }
    out.sigma_hat = BoundaryPath(std::move(ts), std::move(sig));
    return out;
}

std::optional<double> boundary_from_profile(const MassProfile& v, double eps) {
    if (eps < 0.0) eps = 10.0 * std::numeric_limits<double>::epsilon() * v.sup();
    const auto& y = v.values;
    const Grid& g = v.grid;
    std::size_t i = 0;
    while (i < y.size() && !(y[i] > eps)) ++i;
    if (i == y.size()) return std::nullopt;
    if (i == 0) return g.x_lo;
    double x = g.x(i);
    if (i + 1 < y.size() && y[i + 1] > y[i]) {
        double z = x - y[i] * g.h / (y[i + 1] - y[i]);
        return std::clamp(z, g.x(i - 1), x);
    }
    return g.x(i - 1);
}

ErrorCertificate error_certificate(const EnvelopePair& pair, double r) {
    const auto& cfg = pair.config;
    ErrorCertificate c;
    c.analytic_bound = ladder_bound(cfg.Delta, cfg.ladder_switch(), cfg.step_size(), cfg.T);
    double sup_v = 0.0;
    for (const auto& s : pair.snapshots) sup_v = std::max(sup_v, s.upper.sup());
    c.tolerance = 3.0 * cfg.grid.h * sup_v;
    if (std::isinf(r) && r > 0) {
        for (double g : pair.gap_sup) c.measured_gap = std::max(c.measured_gap, g);
    } else {
        std::size_t k = 0;
        while (k < cfg.gap_probes.size() && std::abs(cfg.gap_probes[k] - r) > 0.5 * cfg.grid.h) ++k;
        if (k == cfg.gap_probes.size()) throw UsageError("r was not among the tracked gap probes");
        for (const auto& row : pair.gap_probe) c.measured_gap = std::max(c.measured_gap, row[k]);
    }
    c.within = c.measured_gap <= c.analytic_bound + c.tolerance;
    return c;
}

}  // namespace atlas
