#include "atlasfbp/boundary.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "atlasfbp/errors.hpp"

namespace atlas {

BoundaryPath::BoundaryPath(std::vector<double> t, std::vector<double> v)
    : times(std::move(t)), values(std::move(v)) {
    if (times.empty() || times.size() != values.size())
        throw UsageError("boundary path needs matching, nonempty time and value arrays");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw UsageError("boundary path times must increase strictly");
}

BoundaryPath BoundaryPath::constant(double value, double T, int cells) {
    std::vector<double> t(static_cast<std::size_t>(cells) + 1), v(t.size(), value);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = T * static_cast<double>(i) / cells;
    return BoundaryPath(std::move(t), std::move(v));
}

double BoundaryPath::operator()(double t) const {
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    auto i = static_cast<std::size_t>(it - times.begin()) - 1;
    double f = (t - times[i]) / (times[i + 1] - times[i]);
    return values[i] + f * (values[i + 1] - values[i]);
}

double BoundaryPath::sup_abs() const {
    double m = 0.0;
    for (double y : values) m = std::max(m, std::abs(y));
    return m;
}

double boundary_potential(const BoundaryPath& sigma, double t, double x, double t_from) {
    return boundary_potential(sigma.times, sigma.values, t, x, t_from);
}

double boundary_potential(std::span<const double> times, std::span<const double> values, double t,
                          double x, double t_from) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    if (times.empty() || t > times.back() + slack || t_from < times.front() - slack)
        throw UsageError("boundary path does not cover the requested time interval");
    if (!(t > t_from)) return 0.0;
    const double c = std::sqrt(2.0 / M_PI);
    double total = 0.0;

    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        double s0 = times[i], s1 = times[i + 1];
        double sa = std::max(s0, t_from), sb = std::min(s1, t);
        if (!(sb > sa)) continue;
        // d(s) = sigma(s) - x, linear on the cell
        double slope = (values[i + 1] - values[i]) / (s1 - s0);
        double da = values[i] + slope * (sa - s0) - x;
        double db = values[i] + slope * (sb - s0) - x;
        double ua = std::sqrt(t - sa), ub = std::sqrt(std::max(t - sb, 0.0));
        double dmin = (da > 0.0) != (db > 0.0) ? 0.0 : std::min(std::abs(da), std::abs(db));
        if (dmin * dmin > 100.0 * ua * ua) continue;

        auto integrand = [&](double u) {
            if (u <= 0.0) return dmin == 0.0 && db == 0.0 ? c : 0.0;
            double s = t - u * u;
            double d = da + slope * (s - sa);
            return c * std::exp(-0.5 * d * d / (u * u));
        };
        if (ub < 0.25 * ua) {
            double hi = ua;
            for (int level = 0; level < 12; ++level) {
                double lo = 0.25 * hi;
                if (lo <= ub) break;
                total += Rule::integrate(integrand, lo, hi);
                hi = lo;
            }
            total += Rule::integrate(integrand, ub, hi);
        } else {
            total += Rule::integrate(integrand, ub, ua);
        }
    }
    return total;
}

BoundaryHistogram::BoundaryHistogram(std::vector<double> xe, std::vector<double> te)
    : x_edges(std::move(xe)), t_edges(std::move(te)) {
    if (x_edges.size() < 2 || t_edges.size() < 2) throw UsageError("histogram needs at least one bin per axis");
    mass.assign(nx() * nt(), 0.0);
}

static std::size_t find_bin(const std::vector<double>& e, double x) {
    if (x <= e.front()) return 0;
    if (x >= e.back()) return e.size() - 2;
    return static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), x) - e.begin()) - 1;
}

std::size_t BoundaryHistogram::x_bin(double x) const { return find_bin(x_edges, x); }
std::size_t BoundaryHistogram::t_bin(double t) const { return find_bin(t_edges, t); }

double BoundaryHistogram::slab_mass(std::size_t j) const {
    double s = 0.0;
    for (std::size_t jj = 0; jj <= j && jj < nt(); ++jj)
        for (std::size_t i = 0; i < nx(); ++i) s += at(jj, i);
    return s;
}

double BoundaryHistogram::total() const { return slab_mass(nt() - 1); }

std::vector<double> uniform_edges(double a, double b, double width) {
    auto n = static_cast<std::size_t>(std::ceil((b - a) / width - 1e-9));
    n = std::max<std::size_t>(n, 1);
    std::vector<double> e(n + 1);
    for (std::size_t i = 0; i <= n; ++i) e[i] = a + width * static_cast<double>(i);
    return e;
}

BoundaryHistogram path_to_histogram(const BoundaryPath& sigma, std::vector<double> x_edges,
                                    std::vector<double> t_edges) {
    BoundaryHistogram hist(std::move(x_edges), std::move(t_edges));
    constexpr int sub = 64;
    for (std::size_t j = 0; j < hist.nt(); ++j) {
        double a = hist.t_edges[j], b = std::min(hist.t_edges[j + 1], sigma.t_end());
        if (!(b > a)) continue;
        // split the slab at path nodes so sigma is linear on each piece
        std::vector<double> cuts{a};
        for (double tn : sigma.times)
            if (tn > a && tn < b) cuts.push_back(tn);
        cuts.push_back(b);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            double w = (cuts[c + 1] - cuts[c]) / sub;
            for (int k = 0; k < sub; ++k) {
                double tm = cuts[c] + (k + 0.5) * w;
                hist.at(j, hist.x_bin(sigma(tm))) += w;
            }
        }
    }
    return hist;
}

}  // namespace atlas
