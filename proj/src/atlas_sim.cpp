#include "atlasfbp/atlas_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "atlasfbp/errors.hpp"

namespace atlas {

int SimConfig::steps() const { return std::max(1, static_cast<int>(std::lround(T / step_size()))); }

void SimConfig::validate() const {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    if (dt < 0.0 || step_size() > T) throw ConfigError("dt must lie in (0, T]");
    if (!(window_width > 0.0)) throw ConfigError("window_width must be positive");
    if (record_stride < 1 || refresh_every < 1) throw ConfigError("record_stride and refresh_every must be >= 1");
    if (!(beta_dx > 0.0) || !(beta_x_hi > beta_x_lo) || beta_t_bins < 1)
        throw ConfigError("invalid boundary histogram layout");
    for (double c : checkpoint_times)
        if (c < 0.0 || c > T * (1.0 + 1e-12)) throw ConfigError("checkpoint time outside [0, T]");
}

Ensemble::Ensemble(std::vector<double> positions, std::uint64_t seed, double w)
    : x(std::move(positions)), rng(seed), window_width(w) {
    t_valid.assign(x.size(), 0.0);
    active.assign(x.size(), 0);
    counter.assign(x.size(), 0);
    if (x.empty()) return;
    double m = *std::min_element(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) active[i] = x[i] <= m + window_width;
    rebuild_active();
    find_lead();
}

void Ensemble::catch_up(std::size_t i) {
    double el = t - t_valid[i];
    if (el > 0.0) x[i] += std::sqrt(el) * rng.normal(i, counter[i]++);
    t_valid[i] = t;
}

void Ensemble::rebuild_active() {
    active_idx.clear();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (active[i]) active_idx.push_back(i);
}

void Ensemble::find_lead() {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : active_idx)
        if (x[i] < best) {
            best = x[i];
            lead = i;
        }
}

void Ensemble::refresh(double horizon) {
    if (x.empty()) return;
    const double m = x[lead];
    const double W = window_width;
    for (std::size_t i : active_idx)
        if (x[i] > m + W) {
            active[i] = 0;
            t_valid[i] = t;
        }
    const double floor = m - 0.5 * W;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (active[i]) continue;
        double sd = std::sqrt(t + horizon - t_valid[i]);
        if (x[i] - 6.0 * sd <= m + 0.5 * W) {
            catch_up(i);
            active[i] = 1;
            ++reactivations;
        } else {
            // reflection principle: chance the frozen path dips below the window floor
            double z = (x[i] - floor) / (std::sqrt(2.0) * sd);
            if (z < 27.0) freeze_bound += std::erfc(z);
        }
    }
    rebuild_active();
    find_lead();
}

namespace {

struct MinLoc {
    double v;
    std::size_t i;
};

inline MinLoc better(const MinLoc& a, const MinLoc& b) {
    return (a.v < b.v || (a.v == b.v && a.i < b.i)) ? a : b;
}

}  // namespace

#pragma omp declare reduction(minloc:MinLoc : omp_out = better(omp_in, omp_out)) \
    initializer(omp_priv = MinLoc{std::numeric_limits<double>::infinity(), std::numeric_limits<std::size_t>::max()})

StepInfo step(Ensemble& e, double dt, int n, Exec exec) {
    if (!(dt > 0.0)) throw DomainError("step needs dt > 0");
    StepInfo info{e.lead, e.x.empty() ? 0.0 : e.x[e.lead]};
    if (e.x.empty()) return info;
    e.x[e.lead] += n * dt;
    e.drift_total += n * dt;
    const double sd = std::sqrt(dt);
    const auto na = static_cast<long>(e.active_idx.size());
    MinLoc best{std::numeric_limits<double>::infinity(), std::numeric_limits<std::size_t>::max()};
    double* x = e.x.data();
    std::uint64_t* ctr = e.counter.data();
    const std::size_t* idx = e.active_idx.data();
    const CounterRng& rng = e.rng;
#pragma omp parallel for schedule(static) reduction(minloc : best) if (exec == Exec::parallel)
    for (long k = 0; k < na; ++k) {
        std::size_t i = idx[k];
        x[i] += sd * rng.normal(i, ctr[i]++);
        best = better(MinLoc{x[i], i}, best);
    }
    e.t += dt;
    e.lead = best.i;
    return info;
}

std::pair<std::size_t, double> leftmost(const std::vector<double>& x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (x[i] < x[best]) best = i;
    return {best, x.empty() ? std::numeric_limits<double>::quiet_NaN() : x[best]};
}

std::pair<std::size_t, double> leftmost(const Ensemble& e) { return leftmost(e.x); }

std::vector<double> gaps(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    std::vector<double> g;
    for (std::size_t i = 1; i < x.size(); ++i) g.push_back(x[i] - x[i - 1]);
    return g;
}

std::vector<double> gaps(const Ensemble& e) { return gaps(e.x); }

namespace {

double ierfc(double z) { return std::exp(-z * z) / std::sqrt(M_PI) - z * std::erfc(z); }

void deposit(BoundaryHistogram& h, double x, double a, double b) {
    std::size_t i = h.x_bin(x);
    std::size_t j = h.t_bin(a);
    while (a < b) {
        double end = (j + 1 < h.nt()) ? std::min(b, h.t_edges[j + 1]) : b;
        h.at(j, i) += end - a;
        a = end;
        ++j;
    }
}

}  // namespace

PathRecord simulate(std::vector<double> init, const SimConfig& cfg) {
    cfg.validate();
    std::sort(init.begin(), init.end());
    if (cfg.N_total > 0 && init.size() > cfg.N_total) init.resize(cfg.N_total);
    for (double v : init)
        if (!std::isfinite(v)) throw ConfigError("initial positions must be finite");

    PathRecord rec;
    rec.gaps0 = gaps(init);
    rec.dt = cfg.step_size();
    rec.steps = cfg.steps();
    const double dt = cfg.T / rec.steps;
    rec.dt = dt;
    const int N = rec.steps;
    const double weight = 1.0 / cfg.n;
    rec.beta_hist = BoundaryHistogram(uniform_edges(cfg.beta_x_lo, cfg.beta_x_hi, cfg.beta_dx),
                                      uniform_edges(0.0, cfg.T, cfg.T / cfg.beta_t_bins));
    rec.beta_hist.t_edges.back() = cfg.T;

    std::vector<std::pair<int, double>> cps;
    for (double c : cfg.checkpoint_times) cps.emplace_back(static_cast<int>(std::lround(c / dt)), c);
    std::sort(cps.begin(), cps.end());

    // support density near the far end, for the truncation estimate
    double dens = 0.0, x_last = init.empty() ? 0.0 : init.back();
    for (auto it = init.rbegin(); it != init.rend() && *it >= x_last - 1.0; ++it) dens += weight;

    Ensemble e(std::move(init), cfg.seed, cfg.window_width);
    std::vector<double> yt, yv;
    std::size_t ck = 0;
    double min_at_refresh = 0.0, min_since = 0.0, y_max = -std::numeric_limits<double>::infinity();

    for (int s = 0; s <= N; ++s) {
        e.t = s * dt;
        if (!e.x.empty()) {
            double m = e.x[e.lead];
            min_since = std::min(min_since, m);
            if (s % cfg.refresh_every == 0) {
                if (s > 0) rec.max_min_drop = std::max(rec.max_min_drop, min_at_refresh - min_since);
                e.refresh(cfg.refresh_every * dt);
                min_at_refresh = min_since = e.x[e.lead];
            }
            rec.max_active = std::max(rec.max_active, e.active_idx.size());
        }
        while (ck < cps.size() && cps[ck].first == s) {
            for (std::size_t i = 0; i < e.x.size(); ++i)
                if (!e.active[i]) e.catch_up(i);
            rec.checkpoint_times.push_back(cps[ck].second);
            rec.checkpoints.emplace_back(e.x, weight);
            ++ck;
        }
        if (!e.x.empty() && (s % cfg.record_stride == 0 || s == N)) {
            yt.push_back(e.t);
            yv.push_back(e.x[e.lead]);
        }
        if (!e.x.empty()) y_max = std::max(y_max, e.x[e.lead]);
        if (s == N) break;
        StepInfo info = step(e, dt, cfg.n, cfg.exec);
        if (!std::isfinite(e.x[e.lead]) || !std::isfinite(info.lead_x)) {
            std::ostringstream os;
            os << "non-finite position at step " << s << " (seed " << cfg.seed << ")";
            throw SolverError(os.str());
        }
        if (!e.x.empty()) deposit(rec.beta_hist, info.lead_x, s * dt, (s + 1) * dt);
    }
    if (!yt.empty()) rec.Y0 = BoundaryPath(std::move(yt), std::move(yv));
    rec.drift_total = e.drift_total;
    rec.freeze_bound = e.freeze_bound;
    rec.reactivations = e.reactivations;
    if (!e.x.empty()) {
        double z = (x_last - y_max) / std::sqrt(2.0 * cfg.T);
        rec.truncation_bound = cfg.n * dens * std::sqrt(2.0 * cfg.T) * ierfc(std::max(z, 0.0));
    }
    return rec;
}

}  // namespace atlas
