#include "atlasfbp/initial_conditions.hpp"

#include <algorithm>
#include <cmath>

#include "atlasfbp/errors.hpp"
#include "atlasfbp/rng.hpp"

namespace atlas {

InitialDescriptor InitialDescriptor::linear(double lambda) {
    InitialDescriptor d;
    d.model = Model::linear;
    d.lambda = lambda;
    d.validate();
    return d;
}

InitialDescriptor InitialDescriptor::power(double c, double p) {
    InitialDescriptor d;
    d.model = Model::power;
    d.c = c;
    d.p = p;
    d.validate();
    return d;
}

InitialDescriptor InitialDescriptor::table(std::vector<double> xs, std::vector<double> vs) {
    InitialDescriptor d;
    d.model = Model::table;
    d.table_x = std::move(xs);
    d.table_v = std::move(vs);
    d.validate();
    return d;
}

void InitialDescriptor::validate() const {
    switch (model) {
        case Model::linear:
            if (!(lambda > 0.0)) throw ConfigError("linear model needs lambda > 0");
            break;
        case Model::power:
            if (!(c > 0.0) || !(p > 0.0)) throw ConfigError("power model needs c > 0 and p > 0");
            break;
        case Model::table: {
            if (table_x.size() < 2 || table_x.size() != table_v.size())
                throw ConfigError("table model needs at least two (x, v) points of equal count");
            if (table_x.front() != 0.0 || table_v.front() != 0.0)
                throw ConfigError("table model must start at (0, 0)");
            for (std::size_t k = 1; k < table_x.size(); ++k) {
                if (!(table_x[k] > table_x[k - 1])) throw ConfigError("table x values must increase");
                if (table_v[k] < table_v[k - 1]) throw ConfigError("table v values must be nondecreasing");
            }
            if (!(table_v.back() > table_v[table_v.size() - 2]))
                throw ConfigError("table must end with a positive slope so v0 diverges");
            break;
        }
    }
    if (lambda0_floor && *lambda0_floor < 0.0) throw ConfigError("lambda0_floor must be nonnegative");
}

double InitialDescriptor::v0(double x) const {
    if (x <= 0.0) return 0.0;
    switch (model) {
        case Model::linear: return lambda * x;
        case Model::power: return c * std::pow(x, p);
        case Model::table: {
            auto it = std::upper_bound(table_x.begin(), table_x.end(), x);
            std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - table_x.begin()), table_x.size() - 1);
            std::size_t a = k - 1;
            double s = (table_v[k] - table_v[a]) / (table_x[k] - table_x[a]);
            return table_v[a] + s * (x - table_x[a]);
        }
    }
    return 0.0;
}

double InitialDescriptor::inverse(double m) const {
    if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("cannot invert v0 at a negative or non-finite level");
    if (m == 0.0) return 0.0;
    switch (model) {
        case Model::linear: return m / lambda;
        case Model::power: return std::pow(m / c, 1.0 / p);
        case Model::table: {
            // leftmost segment reaching m, then exact linear inversion
            auto it = std::lower_bound(table_v.begin(), table_v.end(), m);
            std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - table_v.begin()), table_v.size() - 1);
            if (k == 0) return 0.0;
            std::size_t a = k - 1;
            double s = (table_v[k] - table_v[a]) / (table_x[k] - table_x[a]);
            if (!(s > 0.0)) throw ConfigError("table inversion hit a flat segment");
            return table_x[a] + (m - table_v[a]) / s;
        }
    }
    return 0.0;
}

TailModel InitialDescriptor::tail() const {
    switch (model) {
        case Model::linear: return TailModel::linear(0.0, lambda);
        case Model::power: return TailModel::power(c, p);
        case Model::table: {
            std::size_t k = table_x.size() - 1;
            double s = (table_v[k] - table_v[k - 1]) / (table_x[k] - table_x[k - 1]);
            return TailModel::linear(table_v[k] - s * table_x[k], s);
        }
    }
    return TailModel::zero();
}

MassProfile InitialDescriptor::profile(const Grid& g) const {
    return MassProfile::sampled(g, [this](double x) { return v0(x); }, tail());
}

bool InitialDescriptor::floor_holds(const Grid& g) const {
    if (!lambda0_floor) return true;
    for (std::size_t i = 0; i < g.count; ++i) {
        double x = g.x(i);
        if (x > 0.0 && v0(x) < *lambda0_floor * x * (1.0 - 1e-12)) return false;
    }
    return true;
}

std::string InitialDescriptor::name() const {
    switch (model) {
        case Model::linear: return "linear";
        case Model::power: return "power";
        case Model::table: return "table";
    }
    return "unknown";
}

std::vector<double> sample_ppp(const InitialDescriptor& d, int n, std::uint64_t seed, double x_cov) {
    if (n < 1) throw ConfigError("n must be at least 1");
    CounterRng rng(seed);
    std::vector<double> xs;
    double gamma = 0.0;
    const double m_cov = d.v0(x_cov);
    for (std::uint64_t i = 0;; ++i) {
        gamma += rng.exponential(0, i);
        double m = gamma / n;
        if (m > m_cov) break;
        double x = d.inverse(m);
        if (x > x_cov) break;
        xs.push_back(x);
    }
    return xs;
}

std::vector<double> sample_deterministic(const std::function<double(double)>& f, int n, std::size_t count) {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (std::abs(f(0.0)) > 1e-14) throw ConfigError("deterministic map must satisfy f(0) = 0");
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) {
        xs[i] = f(static_cast<double>(i) / n);
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ConfigError("deterministic map is not strictly increasing");
    }
    return xs;
}

std::size_t coverage_count(const InitialDescriptor& d, int n, double x_cov) {
    return static_cast<std::size_t>(std::ceil(n * d.v0(x_cov)));
}

TailConstants tail_constants(const InitialDescriptor& d, double m, int j_max) {
    TailConstants k;
    for (int j = 0; j <= j_max; ++j) {
        double s = d.v0(j + 1.0) - d.v0(static_cast<double>(j));
        double scale = 1.0 + std::pow(static_cast<double>(j), m);
        k.alpha = std::max(k.alpha, s / scale);
    }
    if (!(k.alpha > 0.0)) throw ConfigError("intensity vanishes; tail recipe undefined");
    k.a = std::expm1(k.alpha);
    k.C = std::exp(k.alpha * k.a);
    k.c = k.alpha;
    return k;
}

std::pair<double, double> wilson_interval(int k, int n, double z) {
    if (n <= 0) return {0.0, 1.0};
    double p = static_cast<double>(k) / n;
    double z2 = z * z;
    double den = 1.0 + z2 / n;
    double mid = (p + z2 / (2.0 * n)) / den;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / den;
    return {std::max(0.0, mid - half), std::min(1.0, mid + half)};
}

TailBoundReport check_tail_bound(const InitialSampler& sampler, const std::vector<int>& n_list, double m,
                                 double C, double c, int trials, std::uint64_t seed, int j_max,
                                 std::vector<double> y_grid) {
    TailBoundReport rep;
    rep.trials = trials;
    if (trials == 0) return rep;
    if (trials < 100) throw ConfigError("check_tail_bound needs at least 100 trials");
    const std::size_t J = static_cast<std::size_t>(j_max) + 1;
    for (int n : n_list) {
        std::vector<std::vector<int>> hits(J, std::vector<int>(y_grid.size(), 0));
        for (int t = 0; t < trials; ++t) {
            std::uint64_t s = CounterRng::mix(seed ^ CounterRng::mix(static_cast<std::uint64_t>(n) * 1000003ULL + t));
            auto xs = sampler(n, s);
            std::sort(xs.begin(), xs.end());
            for (std::size_t j = 0; j < J; ++j) {
                double a = static_cast<double>(j), b = a + 1.0;
                auto cnt = std::upper_bound(xs.begin(), xs.end(), b) - std::lower_bound(xs.begin(), xs.end(), a);
                double ratio = static_cast<double>(cnt) / n / (1.0 + std::pow(a, m));
                for (std::size_t k = 0; k < y_grid.size(); ++k)
                    if (ratio > y_grid[k]) ++hits[j][k];
            }
        }
        for (std::size_t j = 0; j < J; ++j)
            for (std::size_t k = 0; k < y_grid.size(); ++k) {
                TailCell cell;
                cell.n = n;
                cell.j = static_cast<int>(j);
                cell.y = y_grid[k];
                cell.bound = C * std::exp(-c * y_grid[k]);
                cell.frequency = static_cast<double>(hits[j][k]) / trials;
                auto [lo, hi] = wilson_interval(hits[j][k], trials);
                cell.wilson_lo = lo;
                cell.wilson_hi = hi;
                cell.pass = lo <= cell.bound;
                rep.pass = rep.pass && cell.pass;
                rep.cells.push_back(cell);
            }
    }
    return rep;
}

}  // namespace atlas
