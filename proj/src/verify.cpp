#include "atlasfbp/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "atlasfbp/errors.hpp"
#include "atlasfbp/heat_semigroup.hpp"
#include "atlasfbp/rng.hpp"

namespace atlas {

namespace {

using State = std::array<double, 2>;

// G'(xi_max) for the trajectory started at G(a) = 0, G'(a) = 2.
double terminal_slope(double a, double xi_max) {
    namespace ode = boost::numeric::odeint;
    State y{0.0, 2.0};
    auto rhs = [](const State& s, State& d, double xi) {
        d[0] = s[1];
        d[1] = s[0] - xi * s[1];
    };
    auto stepper = ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, y, a, xi_max, 1e-3);
    return y[1];
}

template <class F>
double bracket_and_solve(F f, double lo, double hi, int cells, const char* what) {
    double step = (hi - lo) / cells;
    double a = lo, fa = f(a);
    if (fa == 0.0) return a;
    for (int k = 1; k <= cells; ++k) {
        double b = lo + k * step, fb = f(b);
        if (fb == 0.0) return b;
        if ((fa < 0.0) != (fb < 0.0)) {
            std::uintmax_t it = 200;
            auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                       boost::math::tools::eps_tolerance<double>(50), it);
            return 0.5 * (r.first + r.second);
        }
        a = b;
        fa = fb;
    }
    std::ostringstream os;
    os << what << ": no sign change on [" << lo << ", " << hi << "]";
    throw SolverError(os.str());
}

}  // namespace

double selfsimilar_boundary(double lambda, double xi_max) {
    if (!(lambda > 0.0)) throw DomainError("selfsimilar_boundary needs lambda > 0");
    auto f = [&](double a) { return terminal_slope(a, xi_max) - lambda; };
    double a = bracket_and_solve(f, -8.0, 8.0, 64, "self-similar shooting");
    double miss = std::abs(f(a));
    if (miss > 1e-8) {
        std::ostringstream os;
        os << "self-similar shooting missed the far-field slope by " << miss;
        throw SolverError(os.str());
    }
    return a;
}

double selfsimilar_boundary_closed_form(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("selfsimilar_boundary needs lambda > 0");
    auto f = [&](double a) { return 2.0 * a * normal_sf(a) / normal_pdf(a) + (lambda - 2.0); };
    return bracket_and_solve(f, -30.0, 30.0, 60, "self-similar closed form");
}

PdeReference mild_reference(const MassProfile& v0, double T, int steps, const std::vector<double>& times,
                            const Grid& g) {
    PdeReference p;
    p.times = times;
    p.sigma = solve_boundary(v0, T, steps);
    InitialSmoother s0(v0);
    for (double t : times) {
        if (t <= 0.0)
            p.measures.emplace_back(v0);
        else
            p.measures.emplace_back(duhamel_profile(s0, p.sigma, t, g));
    }
    return p;
}

PdeReference as_reference(const PathRecord& record) {
    PdeReference p;
    p.times = record.checkpoint_times;
    p.measures.assign(record.checkpoints.begin(), record.checkpoints.end());
    p.sigma = record.Y0;
    p.beta = record.beta_hist;
    return p;
}

namespace {

// Flat norm of signed bin masses; the appended zero node leaves f free on every bin.
double slab_flat(std::vector<double> w, double dx) {
    w.push_back(0.0);
    return std::max(flat_lp(w, dx), 0.0);
}

}  // namespace

ComparisonReport compare(const PathRecord& record, const PdeReference& pde, int r_max, int n,
                         std::uint64_t seed, double h_lp) {
    if (record.checkpoint_times.size() != pde.times.size() || pde.measures.size() != pde.times.size() ||
        record.checkpoints.size() != record.checkpoint_times.size())
        throw UsageError("compare: checkpoint counts differ");
    for (std::size_t k = 0; k < pde.times.size(); ++k)
        if (std::abs(record.checkpoint_times[k] - pde.times[k]) > 1e-12)
            throw UsageError("compare: checkpoint times differ");
    if (record.Y0.times.empty() || pde.sigma.times.empty() ||
        pde.sigma.t_end() < record.Y0.t_end() - 1e-12 || pde.sigma.times.front() > record.Y0.times.front() + 1e-12)
        throw UsageError("compare: reference boundary does not cover the record");

    ComparisonReport rep;
    rep.n = n;
    rep.seed = seed;
    for (std::size_t k = 0; k < pde.times.size(); ++k) {
        Measure mu = record.checkpoints[k];
        rep.D1 = std::max(rep.D1, d_star(mu, pde.measures[k], r_max, h_lp).value);
    }
    for (std::size_t k = 0; k < record.Y0.times.size(); ++k)
        rep.D2 = std::max(rep.D2, std::abs(record.Y0.values[k] - pde.sigma(record.Y0.times[k])));

    const BoundaryHistogram& bh = record.beta_hist;
    if (bh.x_edges.size() >= 2 && bh.t_edges.size() >= 2) {
        BoundaryHistogram ref = pde.beta ? *pde.beta : path_to_histogram(pde.sigma, bh.x_edges, bh.t_edges);
        if (ref.x_edges != bh.x_edges || ref.t_edges != bh.t_edges)
            throw UsageError("compare: boundary histograms use different bins");
        const double dx = bh.x_edges[1] - bh.x_edges[0];
        std::vector<double> w(bh.nx());
        for (std::size_t j = 0; j < bh.nt(); ++j) {
            double len = bh.t_edges[j + 1] - bh.t_edges[j];
            for (std::size_t i = 0; i < bh.nx(); ++i) w[i] = (bh.at(j, i) - ref.at(j, i)) / len;
            rep.beta_distance = std::max(rep.beta_distance, slab_flat(w, dx));
        }
    }
    return rep;
}

double beta_concentration(const BoundaryHistogram& hist, const BoundaryPath& sigma, int bins) {
    double near = 0.0, total = 0.0;
    for (std::size_t j = 0; j < hist.nt(); ++j) {
        double tm = 0.5 * (hist.t_edges[j] + hist.t_edges[j + 1]);
        auto c = static_cast<long>(hist.x_bin(sigma(tm)));
        for (std::size_t i = 0; i < hist.nx(); ++i) {
            double m = hist.at(j, i);
            total += m;
            if (std::abs(static_cast<long>(i) - c) <= bins) near += m;
        }
    }
    return total > 0.0 ? near / total : 1.0;
}

double beta_slab_error(const BoundaryHistogram& hist) {
    double err = 0.0;
    for (std::size_t j = 0; j < hist.nt(); ++j)
        err = std::max(err, std::abs(hist.slab_mass(j) - (hist.t_edges[j + 1] - hist.t_edges[0])));
    return err;
}

double effective_floor(double lambda0) { return std::min(lambda0, 2.0); }

double density_floor_margin(const MassProfile& v, double sigma, double lambda0, double x_max) {
    double margin = std::numeric_limits<double>::infinity();
    double run_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < v.grid.count; ++k) {
        double x = v.grid.x(k);
        if (x <= sigma) continue;
        if (x > x_max) break;
        double w = v.values[k] - lambda0 * x;
        if (run_max > -std::numeric_limits<double>::infinity()) margin = std::min(margin, w - run_max);
        run_max = std::max(run_max, w);
    }
    return margin;
}

double mild_boundary_slope(const InitialSmoother& s0, const BoundaryPath& path, double t, double s) {
    if (!(t > 0.0) || !(s > 0.0)) throw DomainError("mild_boundary_slope needs t > 0 and s > 0");
    double x = path(t);
    auto v = [&](double y) { return s0(t, y) - boundary_potential(path, t, y); };
    return (-3.0 * v(x) + 4.0 * v(x + s) - v(x + 2.0 * s)) / (2.0 * s);
}

CutFn cut_for_fault(const std::string& fault) {
    if (fault.empty() || fault == "none")
        return [](const MassProfile& v, double d) { return cut(v, d); };
    if (fault == "cut_off_by_one")
        return [](const MassProfile& v, double d) {
            MassProfile c = cut(v, d);
            std::size_t i = c.first_nonzero();
            if (i > 0 && i < c.values.size()) c.values[i - 1] = v.values[i - 1];
            return c;
        };
    throw ConfigError("unknown fault '" + fault + "'");
}

namespace {

constexpr double kSuiteH = 0.01;
const Grid kSuiteGrid = Grid::covering(-2.0, 3.0, kSuiteH);

class Draws {
public:
    Draws(std::uint64_t seed, std::uint64_t stream) : rng_(seed), stream_(stream) {}
    double uniform(double a, double b) { return a + (b - a) * rng_.uniform(stream_, counter_++); }
    // A node of the suite grid in [a, b].
    double node(double a, double b) {
        double x = uniform(a, b);
        return kSuiteGrid.x_lo + kSuiteH * std::round((x - kSuiteGrid.x_lo) / kSuiteH);
    }

private:
    CounterRng rng_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

// Nondecreasing profile starting at a random node in [-0.5, 0.25] with a
// piecewise constant density on cells of width 0.25, continued linearly.
MassProfile random_base(Draws& d) {
    double x0 = d.node(-0.5, 0.25);
    std::vector<double> dens(32);
    for (auto& r : dens) r = d.uniform(0.5, 3.0);
    const Grid& g = kSuiteGrid;
    std::vector<double> y(g.count, 0.0);
    for (std::size_t i = 1; i < g.count; ++i) {
        double xm = g.x(i) - 0.5 * kSuiteH;
        double rate = 0.0;
        if (xm > x0) rate = dens[std::min<std::size_t>(31, static_cast<std::size_t>((xm - x0) / 0.25))];
        y[i] = y[i - 1] + rate * kSuiteH;
    }
    double last_rate = (y.back() - y[g.count - 2]) / kSuiteH;
    double c0 = y.back() - last_rate * g.x_hi();
    return MassProfile(g, std::move(y), TailModel::linear(c0, last_rate));
}

// Mass M spread uniformly over [a, a + w], added to the cumulative profile.
void add_parcel(MassProfile& v, double M, double a, double w) {
    for (std::size_t i = 0; i < v.grid.count; ++i)
        v.values[i] += M * std::clamp((v.grid.x(i) - a) / w, 0.0, 1.0);
    v.tail.coeffs[0] += M;
}

// The discrete cuts are integral-exact, so the orderings hold up to rounding
// and the Gaussian mass lost to kernel truncation.
OrderCertificate ordered(const MassProfile& u, const MassProfile& v, double ell) {
    return precede_mod(u, v, ell, 1e-9 * std::max(u.sup(), v.sup()));
}

struct Pair {
    MassProfile u, v;
};

// u <= v mod ell: a common parcel moved rightward in v (mod 0) and a second
// parcel moved leftward in v by at most ell / m.
Pair random_pair(Draws& d, double ell) {
    MassProfile b = random_base(d);
    Pair p{b, b};
    const double w = 5 * kSuiteH;
    double M = d.uniform(0.0, 2.0);
    double a1 = d.node(-0.5, 1.5);
    double a2 = a1 + d.node(0.0, 0.5);
    add_parcel(p.u, M, a1, w);
    add_parcel(p.v, M, a2, w);
    double m = d.uniform(0.1, 1.0);
    double shift = kSuiteH * std::floor(d.uniform(0.0, 1.0) * ell / m / kSuiteH);
    double c2 = d.node(-0.5, 1.5);
    add_parcel(p.u, m, c2 + shift, w);
    add_parcel(p.v, m, c2, w);
    return p;
}

MassProfile band(const CutFn& cutf, const MassProfile& v, double Delta, double delta) {
    MassProfile shallow = cutf(v, Delta);
    MassProfile deep = cutf(v, Delta + delta);
    MassProfile out = v;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = (v.values[i] - shallow.values[i]) + deep.values[i];
    return out;
}

struct Tally {
    SuiteEntry e;
    explicit Tally(std::string name) { e.name = std::move(name); e.worst = -std::numeric_limits<double>::infinity(); }
    void order(const OrderCertificate& c) { record(c.worst_gap - c.tolerance); }
    void record(double defect) {
        ++e.trials;
        e.worst = std::max(e.worst, defect);
        if (!(defect <= 0.0)) ++e.violations;
    }
};

void finish(SuiteReport& rep, Tally& t) {
    if (t.e.trials == 0) t.e.worst = 0.0;
    rep.violations += t.e.violations;
    rep.entries.push_back(std::move(t.e));
}

void solver_checks(SuiteReport& rep) {
    const double T = 0.05;
    const int steps = 100;
    const Grid g = Grid::covering(-0.5, 1.0, 2e-3);
    Tally floor("solver_density_floor"), conc("solver_beta_concentration"), weak("solver_weak_form"),
        comp("solver_complementarity");
    for (double lambda : {1.0, 2.0, 4.0}) {
        MassProfile v0 = MassProfile::sampled(Grid::covering(-1.0, 4.0, 1e-3),
                                              [&](double x) { return lambda * std::max(x, 0.0); },
                                              TailModel::linear(0.0, lambda));
        BoundaryPath path = solve_boundary(v0, T, steps);
        InitialSmoother s0(v0);

        for (double t : {0.25 * T, 0.5 * T, T}) {
            MassProfile v = duhamel_profile(s0, path, t, g);
            floor.record(-0.01 - density_floor_margin(v, path(t), effective_floor(lambda), 0.9));
        }

        auto hist = path_to_histogram(path, uniform_edges(-0.5, 0.5, 0.01), uniform_edges(0.0, T, T / 25));
        conc.record(0.99 - beta_concentration(hist, path, 2));

        std::vector<double> times;
        for (int k = 0; k <= 100; ++k) times.push_back(T * k / 100);
        Grid gw = Grid::covering(-0.3, 0.3, 1e-3);
        SnapshotSeries snaps = mild_snapshots(v0, path, times, gw);
        auto battery = default_battery(T, 0.0, 0.1);
        ResidualReport r = weak_form_residual(snaps, path, v0, battery);
        weak.record(r.weak_form_max - 1e-3 * battery_scale(battery));
        comp.record(r.complementarity - 5e-3 * T);
    }
    finish(rep, floor);
    finish(rep, conc);
    finish(rep, weak);
    finish(rep, comp);
}

}  // namespace

SuiteReport property_suite(const SuiteOptions& opt) {
    SuiteReport rep;
    if (opt.trials <= 0) return rep;
    const CutFn cutf = cut_for_fault(opt.inject_fault);

    Tally cut_mass("cut_removes_delta"), cut_ord("cut_order"), smooth_ord("smooth_order"),
        band_ord("band_order"), cross_ord("cross_order"), delta_mono("delta_monotone");

    for (int k = 0; k < opt.trials; ++k) {
        Draws d(opt.seed, static_cast<std::uint64_t>(k));
        const double delta = d.uniform(0.01, 0.3);

        {
            MassProfile v = random_base(d);
            MassProfile c = cutf(v, delta);
            double removed = cumulative(v).back() - cumulative(c).back();
            cut_mass.record(std::abs(removed - delta) - 1e-9);
        }
        {
            double ell = d.uniform(0.0, 0.2);
            Pair p = random_pair(d, ell);
            cut_ord.order(ordered(cutf(p.u, delta), cutf(p.v, delta), ell));
        }
        {
            double ell = d.uniform(0.0, 0.2);
            double sd = d.uniform(1e-3, 1e-2);
            Pair p = random_pair(d, ell);
            smooth_ord.order(ordered(smooth(p.u, sd), smooth(p.v, sd), ell));
        }
        {
            double ell = d.uniform(0.0, 0.2);
            double Delta = d.uniform(0.05, 0.5);
            Pair p = random_pair(d, ell);
            band_ord.order(ordered(band(cutf, p.u, Delta, delta), band(cutf, p.v, Delta, delta), ell));
        }
        {
            double Delta = d.uniform(0.05, 0.5);
            double Dp = Delta + d.uniform(0.0, 0.3);
            Pair p = random_pair(d, Dp);
            cross_ord.order(ordered(cutf(p.u, delta), band(cutf, p.v, Delta, delta), Dp));
        }
        {
            MassProfile v = random_base(d);
            double Delta = d.uniform(0.05, 0.5);
            double Dhat = d.uniform(0.01, 1.0) * Delta;
            delta_mono.order(ordered(band(cutf, v, Delta, delta), band(cutf, v, Dhat, delta), 0.0));
        }
    }
    for (Tally* t : {&cut_mass, &cut_ord, &smooth_ord, &band_ord, &cross_ord, &delta_mono}) finish(rep, *t);

    if (opt.solver_checks) solver_checks(rep);
    return rep;
}

}  // namespace atlas
