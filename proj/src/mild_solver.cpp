#include "atlasfbp/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "atlasfbp/errors.hpp"

namespace atlas {

MassProfile duhamel_profile(const InitialSmoother& s0, const BoundaryPath& sigma, double t,
                            const Grid& grid, Exec exec) {
    if (!(t > 0.0)) throw DomainError("duhamel_profile needs t > 0");
    if (t > sigma.t_end() * (1.0 + 1e-12) + 1e-15) throw UsageError("boundary path ends before t");
    std::vector<double> y(grid.count);
    const auto n = static_cast<long>(grid.count);
#pragma omp parallel for schedule(dynamic, 64) if (exec == Exec::parallel)
    for (long i = 0; i < n; ++i) {
        double x = grid.x(static_cast<std::size_t>(i));
        y[static_cast<std::size_t>(i)] = s0(t, x) - boundary_potential(sigma, t, x);
    }
    return MassProfile(grid, std::move(y), TailModel::zero());
}

MassProfile duhamel_profile(const MassProfile& v0, const BoundaryPath& sigma, double t,
                            const Grid& grid, Exec exec) {
    MassProfile out = duhamel_profile(InitialSmoother(v0), sigma, t, grid, exec);
    // far right the boundary term is negligible and the tail is that of S_t v0
    out.tail = v0.tail.kind == TailModel::Kind::power && v0.tail.coeffs[1] != std::floor(v0.tail.coeffs[1])
                   ? v0.tail
                   : v0.tail.smoothed(t);
    return out;
}

MassProfile restart_profile(const MassProfile& v_tau, const BoundaryPath& sigma, double tau, double t,
                            const Grid& grid, Exec exec) {
    if (!(t > tau)) {
        if (t == tau) return v_tau;
        throw UsageError("restart needs t >= tau");
    }
    if (tau < sigma.times.front() - 1e-12 || t > sigma.t_end() * (1.0 + 1e-12) + 1e-15)
        throw UsageError("boundary path does not cover [tau, t]");
    InitialSmoother s(v_tau);
    std::vector<double> y(grid.count);
    const auto n = static_cast<long>(grid.count);
#pragma omp parallel for schedule(dynamic, 64) if (exec == Exec::parallel)
    for (long i = 0; i < n; ++i) {
        double x = grid.x(static_cast<std::size_t>(i));
        y[static_cast<std::size_t>(i)] = s(t - tau, x) - boundary_potential(sigma, t, x, tau);
    }
    return MassProfile(grid, std::move(y), TailModel::zero());
}

BoundaryPath solve_boundary(const MassProfile& v0, double T, int steps, const MildOptions& opt) {
    if (!(T > 0.0) || steps < 1) throw ConfigError("solve_boundary needs T > 0 and steps >= 1");
    InitialSmoother s0(v0);
    const double dt = T / steps;
    std::vector<double> ts(static_cast<std::size_t>(steps) + 1);
    for (int m = 0; m <= steps; ++m) ts[static_cast<std::size_t>(m)] = m * dt;
    std::vector<double> sig(ts.size(), 0.0);

    for (int m = 1; m <= steps; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        const double tm = ts[mi];
        std::span<const double> tspan(ts.data(), mi + 1);
        std::span<const double> vspan(sig.data(), mi + 1);
        auto g = [&](double c) {
            sig[mi] = c;
            return s0(tm, c) - boundary_potential(tspan, vspan, tm, c);
        };
        double w = opt.bracket_width * std::sqrt(dt);
        double lo = sig[mi - 1] - w, hi = sig[mi - 1] + w;
        double glo = g(lo), ghi = g(hi);
        int expansions = 0;
        while (!(glo < 0.0 && ghi > 0.0) && expansions < opt.max_expansions) {
            w *= 2.0;
            lo = sig[mi - 1] - w;
            hi = sig[mi - 1] + w;
            glo = g(lo);
            ghi = g(hi);
            ++expansions;
        }
        if (!(glo < 0.0 && ghi > 0.0)) {
            std::ostringstream os;
            os << "cannot bracket the boundary at t=" << tm << ": v(" << lo << ")=" << glo << ", v(" << hi
               << ")=" << ghi << "; previous sigma=" << sig[mi - 1];
            throw SolverError(os.str());
        }
        boost::uintmax_t iters = static_cast<boost::uintmax_t>(opt.max_iterations);
        auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
        double root = 0.5 * (r.first + r.second);
        if (!std::isfinite(root)) throw SolverError("boundary root is not finite");
        sig[mi] = root;
    }
    return BoundaryPath(std::move(ts), std::move(sig));
}

SnapshotSeries mild_snapshots(const MassProfile& v0, const BoundaryPath& sigma,
                              const std::vector<double>& times, const Grid& grid, Exec exec) {
    InitialSmoother s0(v0);
    SnapshotSeries out;
    for (double t : times) {
        out.times.push_back(t);
        if (t <= 0.0) {
            out.profiles.push_back(MassProfile::sampled(grid, [&](double x) { return v0(x); }));
        } else {
            out.profiles.push_back(duhamel_profile(s0, sigma, t, grid, exec));
        }
    }
    return out;
}

namespace {

double b0(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double q = 1.0 - s * s;
    return q * q * q;
}

double b1(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double q = 1.0 - s * s;
    return -6.0 * s * q * q;
}

double b2(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    double q = 1.0 - s * s;
    return q * (30.0 * s * s - 6.0);
}

}  // namespace

double Bump::phi(double x, double t) const { return b0((x - xc) / wx) * b0((t - tc) / wt); }

double Bump::phi_t(double x, double t) const { return b0((x - xc) / wx) * b1((t - tc) / wt) / wt; }

double Bump::phi_xx(double x, double t) const {
    return b2((x - xc) / wx) * b0((t - tc) / wt) / (wx * wx);
}

double Bump::phi_t_l1() const { return wx * (32.0 / 35.0) * 2.0; }

std::vector<Bump> default_battery(double T, double x_center, double wx) {
    std::vector<Bump> out;
    for (double tf : {0.24, 0.5, 0.76})
        for (int k = -1; k <= 1; ++k) out.push_back(Bump{x_center + k * wx, wx, tf * T, 0.2 * T});
    return out;
}

double battery_scale(const std::vector<Bump>& battery) {
    double s = 0.0;
    for (const auto& b : battery) s = std::max(s, b.phi_t_l1());
    return s;
}

namespace {

void check_support(const SnapshotSeries& v, const Bump& b) {
    if (v.times.empty()) throw UsageError("no snapshots");
    const Grid& g = v.profiles.front().grid;
    if (b.xc - b.wx < g.x_lo || b.xc + b.wx > g.x_hi())
        throw UsageError("test function leaves the spatial window");
    if (b.tc + b.wt > v.times.back() + 1e-12 || (b.tc - b.wt < v.times.front() - 1e-12 && v.times.front() > 0.0))
        throw UsageError("test function leaves the snapshot time range");
}

// -int int (phi_t + phi_xx / 2) v dx dt - <phi(., 0), v0>
double volume_terms(const SnapshotSeries& v, const MassProfile& v0, const Bump& b) {
    std::vector<double> It(v.times.size(), 0.0);
    for (std::size_t k = 0; k < v.times.size(); ++k) {
        double t = v.times[k];
        if (std::abs(t - b.tc) >= b.wt) continue;
        const auto& p = v.profiles[k];
        const Grid& g = p.grid;
        double s = 0.0;
        for (std::size_t i = 0; i < g.count; ++i) {
            double x = g.x(i);
            if (std::abs(x - b.xc) >= b.wx) continue;
            s += (b.phi_t(x, t) + 0.5 * b.phi_xx(x, t)) * p.values[i];
        }
        It[k] = s * g.h;  // interior trapezoid: bump vanishes at the ends
    }
    double vol = 0.0;
    for (std::size_t k = 1; k < It.size(); ++k) vol += 0.5 * (It[k] + It[k - 1]) * (v.times[k] - v.times[k - 1]);
    double init = 0.0;
    if (b.tc - b.wt < 0.0) {
        const Grid& g = v.profiles.front().grid;
        for (std::size_t i = 0; i < g.count; ++i) init += b.phi(g.x(i), 0.0) * v0(g.x(i)) * g.h;
    }
    return -vol - init;
}

double path_term(const BoundaryPath& sigma, const Bump& b) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    double a = std::max(0.0, b.tc - b.wt), e = std::min(sigma.t_end(), b.tc + b.wt);
    if (!(e > a)) return 0.0;
    constexpr int panels = 32;
    double w = (e - a) / panels, s = 0.0;
    auto f = [&](double t) { return b.phi(sigma(t), t); };
    for (int p = 0; p < panels; ++p) s += Rule::integrate(f, a + p * w, a + (p + 1) * w);
    return s;
}

double hist_term(const BoundaryHistogram& h, const Bump& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < h.nt(); ++j) {
        double t = 0.5 * (h.t_edges[j] + h.t_edges[j + 1]);
        for (std::size_t i = 0; i < h.nx(); ++i) {
            double m = h.at(j, i);
            if (m != 0.0) s += m * b.phi(0.5 * (h.x_edges[i] + h.x_edges[i + 1]), t);
        }
    }
    return s;
}

template <class BetaTerm>
ResidualReport residual_impl(const SnapshotSeries& v, const MassProfile& v0,
                             const std::vector<Bump>& battery, BetaTerm beta_term) {
    ResidualReport r;
    r.test_count = static_cast<int>(battery.size());
    r.per_test.resize(battery.size());
    for (const auto& b : battery) check_support(v, b);
    const auto n = static_cast<long>(battery.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
        const Bump& b = battery[static_cast<std::size_t>(k)];
        r.per_test[static_cast<std::size_t>(k)] = std::abs(volume_terms(v, v0, b) + beta_term(b));
    }
    for (double d : r.per_test) r.weak_form_max = std::max(r.weak_form_max, d);
    return r;
}

}  // namespace

ResidualReport weak_form_residual(const SnapshotSeries& v, const BoundaryPath& beta,
                                  const MassProfile& v0, const std::vector<Bump>& battery) {
    ResidualReport r = residual_impl(v, v0, battery, [&](const Bump& b) { return path_term(beta, b); });
    r.complementarity = complementarity(v, beta);
    return r;
}

ResidualReport weak_form_residual(const SnapshotSeries& v, const BoundaryHistogram& beta,
                                  const MassProfile& v0, const std::vector<Bump>& battery) {
    return residual_impl(v, v0, battery, [&](const Bump& b) { return hist_term(beta, b); });
}

double complementarity(const SnapshotSeries& v, const BoundaryPath& beta) {
    double s = 0.0;
    for (std::size_t k = 1; k < v.times.size(); ++k) {
        double a = std::abs(v.profiles[k - 1](beta(v.times[k - 1])));
        double b = std::abs(v.profiles[k](beta(v.times[k])));
        if (v.times[k - 1] == 0.0) a = 0.0;  // beta has no mass at t = 0
        s += 0.5 * (a + b) * (v.times[k] - v.times[k - 1]);
    }
    return s;
}

}  // namespace atlas
