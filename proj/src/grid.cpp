#include "atlasfbp/grid.hpp"

#include <cmath>

#include "atlasfbp/errors.hpp"

namespace atlas {

Grid::Grid(double x_lo_, double h_, std::size_t count_) : x_lo(x_lo_), h(h_), count(count_) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid spacing must be positive");
    if (count < 2) throw ConfigError("grid needs at least two nodes");
    if (!std::isfinite(x_lo)) throw ConfigError("grid origin must be finite");
}

Grid Grid::covering(double a, double b, double h) {
    if (!(b > a)) throw ConfigError("grid window is empty");
    auto cells = static_cast<std::size_t>(std::ceil((b - a) / h - 1e-9));
    return Grid(a, h, std::max<std::size_t>(cells, 1) + 1);
}

std::vector<double> Grid::nodes() const {
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) xs[i] = x(i);
    return xs;
}

bool Grid::same_as(const Grid& o) const {
    return count == o.count && std::abs(h - o.h) <= 1e-12 * h &&
           std::abs(x_lo - o.x_lo) <= 1e-9 * h;
}

TailModel TailModel::zero() { return {}; }

TailModel TailModel::linear(double c0, double c1) {
    TailModel t;
    t.kind = Kind::linear;
    t.coeffs = {c0, c1};
    return t;
}

TailModel TailModel::power(double c, double p) {
    if (c < 0.0 || p < 0.0) throw ConfigError("power tail needs c >= 0 and p >= 0");
    TailModel t;
    t.kind = Kind::power;
    t.coeffs = {c, p};
    return t;
}

TailModel TailModel::polynomial(std::vector<double> a) {
    TailModel t;
    t.kind = Kind::polynomial;
    t.coeffs = std::move(a);
    if (t.coeffs.empty()) t.coeffs = {0.0};
    return t;
}

static double horner(const std::vector<double>& a, double x) {
    double s = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * x + *it;
    return s;
}

double TailModel::eval(double x) const {
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::linear: return coeffs[0] + coeffs[1] * x;
        case Kind::power: return coeffs[0] * std::pow(std::max(x, 0.0), coeffs[1]);
        case Kind::polynomial: return horner(coeffs, x);
    }
    return 0.0;
}

double TailModel::integral(double a, double b) const {
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::linear:
            return coeffs[0] * (b - a) + 0.5 * coeffs[1] * (b * b - a * a);
        case Kind::power: {
            double q = coeffs[1] + 1.0;
            return coeffs[0] * (std::pow(std::max(b, 0.0), q) - std::pow(std::max(a, 0.0), q)) / q;
        }
        case Kind::polynomial: {
            std::vector<double> anti(coeffs.size() + 1, 0.0);
            for (std::size_t k = 0; k < coeffs.size(); ++k) anti[k + 1] = coeffs[k] / double(k + 1);
            return horner(anti, b) - horner(anti, a);
        }
    }
    return 0.0;
}

bool TailModel::as_polynomial(std::vector<double>& a) const {
    switch (kind) {
        case Kind::zero: a = {0.0}; return true;
        case Kind::linear: a = coeffs; return true;
        case Kind::polynomial: a = coeffs; return true;
        case Kind::power: {
            double p = coeffs[1];
            if (p != std::floor(p)) return false;
            a.assign(static_cast<std::size_t>(p) + 1, 0.0);
            a.back() = coeffs[0];
            return true;
        }
    }
    return false;
}

TailModel TailModel::smoothed(double delta) const {
    if (kind == Kind::zero || kind == Kind::linear) return *this;
    std::vector<double> a;
    if (!as_polynomial(a))
        throw ConfigError("cannot smooth a non-integer power tail analytically");
    // E[(x+W)^k] = sum_j C(k,j) x^(k-j) E[W^j], E[W^j] = (j-1)!! delta^(j/2) for even j
    std::vector<double> out(a.size(), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        double binom = 1.0;
        double moment = 1.0;
        for (std::size_t j = 0; j <= k; ++j) {
            if (j > 0) binom = binom * double(k - j + 1) / double(j);
            if (j >= 2 && j % 2 == 0) moment *= double(j - 1) * delta;
            if (j % 2 == 0) out[k - j] += a[k] * binom * moment;
        }
    }
    TailModel t = polynomial(std::move(out));
    t.valid_to = valid_to;
    return t;
}

}  // namespace atlas
