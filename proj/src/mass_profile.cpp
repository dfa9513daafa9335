#include "atlasfbp/mass_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atlasfbp/errors.hpp"

namespace atlas {

MassProfile::MassProfile(Grid g, std::vector<double> v, TailModel t)
    : grid(g), values(std::move(v)), tail(std::move(t)) {
    if (values.size() != grid.count) throw UsageError("profile size does not match its grid");
}

double MassProfile::operator()(double x) const {
    if (x < grid.x_lo) return 0.0;
    if (x >= grid.x_hi()) return x == grid.x_hi() ? values.back() : tail.eval(x);
    double s = (x - grid.x_lo) / grid.h;
    auto i = static_cast<std::size_t>(s);
    if (i >= grid.count - 1) i = grid.count - 2;
    double f = s - static_cast<double>(i);
    return values[i] + f * (values[i + 1] - values[i]);
}

double MassProfile::sup() const {
    double m = 0.0;
    for (double y : values) m = std::max(m, std::abs(y));
    return m;
}

bool MassProfile::nonnegative(double tol) const {
    return std::all_of(values.begin(), values.end(), [tol](double y) { return y >= -tol; });
}

bool MassProfile::nondecreasing(double tol) const {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1] - tol) return false;
    return true;
}

std::size_t MassProfile::first_nonzero() const {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] != 0.0) return i;
    return values.size();
}

PointMeasure::PointMeasure(std::vector<double> a, double w) : atoms(std::move(a)), weight(w) {
    if (!(weight > 0.0)) throw ConfigError("point measure weight must be positive");
    std::sort(atoms.begin(), atoms.end());
}

std::vector<double> cumulative(const MassProfile& v) {
    const auto& y = v.values;
    std::vector<double> c(y.size(), 0.0);
    const double hh = 0.5 * v.grid.h;
    for (std::size_t i = 1; i < y.size(); ++i) c[i] = c[i - 1] + hh * (y[i - 1] + y[i]);
    return c;
}

static double partial_cell(double a, double b, double s, double h) {
    return a * s + 0.5 * (b - a) * s * s / h;
}

Antiderivative::Antiderivative(const MassProfile& v) : v_(&v), c_(cumulative(v)) {}

double Antiderivative::operator()(double r) const {
    const MassProfile& v = *v_;
    if (!std::isfinite(r)) throw DomainError("integral_left needs a finite upper limit");
    if (r > v.tail.valid_to) throw DomainError("upper limit beyond the tail model's validity");
    const Grid& g = v.grid;
    if (r <= g.x_lo) return 0.0;
    if (r >= g.x_hi()) return c_.back() + v.tail.integral(g.x_hi(), r);
    auto i = std::min(static_cast<std::size_t>((r - g.x_lo) / g.h), g.count - 2);
    return c_[i] + partial_cell(v.values[i], v.values[i + 1], r - g.x(i), g.h);
}

double integral_left(const MassProfile& v, double r) { return Antiderivative(v)(r); }

namespace {

struct Located {
    std::size_t j;  // cell [x_j, x_{j+1}] holding gamma
    double gamma;
};

Located locate(const MassProfile& v, const std::vector<double>& c, double delta) {
    if (!(delta >= 0.0)) throw DomainError("cut depth must be nonnegative");
    if (delta > c.back())
        throw OverflowError("cut depth exceeds the integral available on the grid; widen the window");
    const Grid& g = v.grid;
    if (delta == 0.0) return {0, g.x_lo};
    auto it = std::lower_bound(c.begin() + 1, c.end(), delta);
    std::size_t j = static_cast<std::size_t>(it - c.begin()) - 1;
    double need = delta - c[j];
    double a = v.values[j];
    double b = v.values[j + 1];
    double disc = std::max(a * a + 2.0 * (b - a) * need / g.h, 0.0);
    double den = a + std::sqrt(disc);
    double s = den > 0.0 ? 2.0 * need / den : g.h;
    s = std::clamp(s, 0.0, g.h);
    return {j, g.x(j) + s};
}

}  // namespace

double gamma_quantile(const MassProfile& v, double delta) {
    auto c = cumulative(v);
    return locate(v, c, delta).gamma;
}

CutResult cut_with_gamma(const MassProfile& v, double delta) {
    auto c = cumulative(v);
    Located loc = locate(v, c, delta);
    CutResult out{v, loc.gamma};
    if (delta == 0.0) return out;

    auto& y = out.profile.values;
    const double h = v.grid.h;
    const std::size_t j = loc.j;
    const double rem = c[j + 1] - delta;
    std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(j), 0.0);
    // node j touches cell j-1 (whose left node is now zero) and cell j
    double cj = (j == 0) ? 2.0 * rem / h - y[j + 1] : rem / h - 0.5 * y[j + 1];
    if (cj >= 0.0) {
        y[j] = cj;
    } else {
        y[j] = 0.0;
        y[j + 1] = (j + 1 == y.size() - 1) ? 2.0 * rem / h : rem / h + 0.5 * y[j + 1];
    }
    return out;
}

MassProfile cut(const MassProfile& v, double delta) { return cut_with_gamma(v, delta).profile; }

MassProfile cut_band(const MassProfile& v, double Delta, double delta) {
    if (!(Delta > 0.0) || !(delta > 0.0)) throw DomainError("band cut needs Delta > 0 and delta > 0");
    MassProfile shallow = cut(v, Delta);
    MassProfile deep = cut(v, Delta + delta);
    MassProfile out = v;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = (v.values[i] - shallow.values[i]) + deep.values[i];
    return out;
}

OrderCertificate precede_mod(const MassProfile& u, const MassProfile& v, double ell,
                             std::optional<double> tol) {
    if (!u.grid.same_as(v.grid)) throw UsageError("precede_mod needs a shared grid");
    OrderCertificate cert;
    cert.tolerance = tol ? *tol : 3.0 * u.grid.h * std::max(u.sup(), v.sup());
    auto U = cumulative(u);
    auto V = cumulative(v);
    cert.worst_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < U.size(); ++i) {
        double gap = V[i] - U[i] - ell;
        if (gap > cert.worst_gap) {
            cert.worst_gap = gap;
            cert.worst_r = u.grid.x(i);
        }
    }
    cert.holds = cert.worst_gap <= cert.tolerance;
    return cert;
}

MassProfile cdf_of_points(const PointMeasure& mu, const Grid& grid) {
    std::vector<double> y(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        auto k = std::upper_bound(mu.atoms.begin(), mu.atoms.end(), grid.x(i)) - mu.atoms.begin();
        y[i] = mu.weight * static_cast<double>(k);
    }
    double last = y.back();
    return MassProfile(grid, std::move(y), TailModel::linear(last, 0.0));
}

}  // namespace atlas
