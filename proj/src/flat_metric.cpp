#include "atlasfbp/flat_metric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "atlasfbp/errors.hpp"

namespace atlas {

double support_left(const Measure& m) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (auto* p = std::get_if<PointMeasure>(&m)) return p->atoms.empty() ? inf : p->atoms.front();
    const auto& v = std::get<MassProfile>(m);
    std::size_t i = v.first_nonzero();
    if (i == v.values.size()) return v.tail.kind == TailModel::Kind::zero ? inf : v.grid.x_hi();
    return i == 0 ? v.grid.x_lo : v.grid.x(i - 1);
}

std::vector<double> node_masses(const Measure& m, const Grid& g) {
    std::vector<double> w(g.count, 0.0);
    const double h = g.h;
    if (auto* p = std::get_if<PointMeasure>(&m)) {
        for (double a : p->atoms) {
            if (a < g.x_lo - 1e-12 * h)
                throw UsageError("atom left of the metric grid");
            double s = (a - g.x_lo) / h;
            if (s >= static_cast<double>(g.count - 1)) {
                if (s <= static_cast<double>(g.count - 1) + 1e-12) w.back() += p->weight;
                continue;
            }
            auto j = static_cast<std::size_t>(s);
            double f = s - static_cast<double>(j);
            w[j] += p->weight * (1.0 - f);
            w[j + 1] += p->weight * f;
        }
        return w;
    }
    const auto& v = std::get<MassProfile>(m);
    if (v.first_nonzero() < v.values.size() && support_left(m) < g.x_lo - 1e-12 * h)
        throw UsageError("profile support starts left of the metric grid");
    Antiderivative G(v);
    // w_j = (G(x_{j+1}) - 2 G(x_j) + G(x_{j-1})) / h; the first node's hat is one-sided
    std::vector<double> gx(g.count + 1);
    for (std::size_t j = 0; j < g.count; ++j) gx[j] = G(g.x(j));
    gx[g.count] = G(g.x_hi() + h);
    double gm = G(g.x_lo - h);
    for (std::size_t j = 0; j < g.count; ++j) {
        double left = (j == 0) ? gm : gx[j - 1];
        w[j] = (gx[j + 1] - 2.0 * gx[j] + left) / h;
    }
    return w;
}

namespace {

// Concave piecewise linear function on [lo, hi], stored as value at lo and
// segments with strictly decreasing slopes.
struct Seg {
    double len;
    double slope;
};

struct ConcavePL {
    double lo = 0.0;
    double hi = 0.0;
    double v_lo = 0.0;
    std::deque<Seg> segs;

    // g(y) = max_{|z - y| <= s} f(z): a flat piece of width 2s at the argmax.
    void window_max(double s) {
        if (s <= 0.0) return;
        auto it = std::find_if(segs.begin(), segs.end(), [](const Seg& q) { return q.slope <= 0.0; });
        if (it != segs.end() && it->slope == 0.0)
            it->len += 2.0 * s;
        else
            segs.insert(it, Seg{2.0 * s, 0.0});
        lo -= s;
        hi += s;
    }

    void clip(double a, double b) {
        if (lo < a) {
            double cut = a - lo;
            while (cut > 0.0 && !segs.empty()) {
                Seg& q = segs.front();
                double take = std::min(cut, q.len);
                v_lo += take * q.slope;
                q.len -= take;
                cut -= take;
                if (q.len <= 0.0) segs.pop_front();
            }
            lo = a;
        }
        if (hi > b) {
            double cut = hi - b;
            while (cut > 0.0 && !segs.empty()) {
                Seg& q = segs.back();
                double take = std::min(cut, q.len);
                q.len -= take;
                cut -= take;
                if (q.len <= 0.0) segs.pop_back();
            }
            hi = b;
        }
    }

    void add_linear(double w) {
        v_lo += w * lo;
        for (auto& q : segs) q.slope += w;
    }

    double max_value() const {
        double v = v_lo;
        double best = v;
        for (const auto& q : segs) {
            if (q.slope <= 0.0) break;
            v += q.slope * q.len;
            best = std::max(best, v);
        }
        return best;
    }
};

}  // namespace

double flat_lp_fixed(const std::vector<double>& w, double h, double M) {
    if (w.empty()) return 0.0;
    const double s = (1.0 - M) * h;
    ConcavePL f;  // value function of the last node: f = 0 there
    for (std::size_t k = w.size() - 1; k-- > 0;) {
        f.window_max(s);
        f.clip(-M, M);
        f.add_linear(w[k]);
    }
    return f.max_value();
}

double flat_lp(const std::vector<double>& w, double h) {
    if (!(h > 0.0)) throw UsageError("metric grid spacing must be positive");
    // The optimum is concave in M, so golden-section search is exact up to its tolerance.
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, b = 1.0;
    double m1 = b - phi * (b - a), m2 = a + phi * (b - a);
    double f1 = flat_lp_fixed(w, h, m1), f2 = flat_lp_fixed(w, h, m2);
    double best = std::max({flat_lp_fixed(w, h, 0.0), flat_lp_fixed(w, h, 1.0), f1, f2});
    while (b - a > 1e-11) {
        if (f1 < f2) {
            a = m1;
            m1 = m2;
            f1 = f2;
            m2 = a + phi * (b - a);
            f2 = flat_lp_fixed(w, h, m2);
        } else {
            b = m2;
            m2 = m1;
            f2 = f1;
            m1 = b - phi * (b - a);
            f1 = flat_lp_fixed(w, h, m1);
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

double d_flat_r(const Measure& mu, const Measure& nu, double r, double h_lp) {
    if (!(h_lp > 0.0)) throw UsageError("metric grid spacing must be positive");
    double left = std::min(support_left(mu), support_left(nu));
    if (!(left < r)) return 0.0;
    auto cells = static_cast<std::size_t>(std::ceil((r - left) / h_lp)) + 1;
    Grid g(r - static_cast<double>(cells) * h_lp, h_lp, cells + 1);
    auto a = node_masses(mu, g);
    auto b = node_masses(nu, g);
    for (std::size_t j = 0; j < a.size(); ++j) a[j] -= b[j];
    double up = flat_lp(a, h_lp);
    for (double& x : a) x = -x;
    double down = flat_lp(a, h_lp);
    // the program is symmetric under f -> -f; take both sides to cancel rounding
    return std::max({up, down, 0.0});
}

DStar d_star(const Measure& mu, const Measure& nu, int r_max, double h_lp) {
    if (r_max < 1) throw UsageError("r_max must be at least 1");
    DStar out;
    double scale = 1.0;
    for (int r = 1; r <= r_max; ++r) {
        scale *= 0.5;
        out.value += scale * std::min(1.0, d_flat_r(mu, nu, static_cast<double>(r), h_lp));
    }
    out.truncation_error = scale;
    return out;
}

}  // namespace atlas
