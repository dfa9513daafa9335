#pragma once

#include <optional>
#include <vector>

#include "atlasfbp/grid.hpp"

namespace atlas {

/// Cumulative mass function sampled on a grid: piecewise linear between
/// nodes, zero left of x_lo, and given by `tail` right of x_hi.
struct MassProfile {
    Grid grid;
    std::vector<double> values;
    TailModel tail;

    MassProfile() = default;
    MassProfile(Grid g, std::vector<double> v, TailModel t = TailModel::zero());

    /// Sample f at the nodes of g; the tail is taken from `tail`.
    template <class F>
    static MassProfile sampled(const Grid& g, F&& f, TailModel tail = TailModel::zero()) {
        std::vector<double> v(g.count);
        for (std::size_t i = 0; i < g.count; ++i) v[i] = f(g.x(i));
        return MassProfile(g, std::move(v), std::move(tail));
    }

    double operator()(double x) const;
    double sup() const;
    bool nonnegative(double tol = 0.0) const;
    bool nondecreasing(double tol = 0.0) const;
    /// Index of the first node with a nonzero value, or count if none.
    std::size_t first_nonzero() const;
};

/// Sorted atoms with a common weight (the empirical measure of n particles has weight 1/n).
struct PointMeasure {
    std::vector<double> atoms;
    double weight = 1.0;

    PointMeasure() = default;
    PointMeasure(std::vector<double> a, double w);
};

/// Cumulative trapezoid integral C[i] = int_{x_lo}^{x_i} v, C[0] = 0.
std::vector<double> cumulative(const MassProfile& v);

/// int_{-inf}^r v(x) dx, exact for the piecewise linear interpolant.
double integral_left(const MassProfile& v, double r);

/// Precomputed r -> integral_left(v, r) for repeated queries.
class Antiderivative {
public:
    explicit Antiderivative(const MassProfile& v);
    double operator()(double r) const;

private:
    const MassProfile* v_;
    std::vector<double> c_;
};

/// Leftmost gamma with integral_left(v, gamma) = delta.
double gamma_quantile(const MassProfile& v, double delta);

struct CutResult {
    MassProfile profile;
    double gamma = 0.0;
};

/// Remove the leftmost `delta` of integral. The node values are adjusted so the
/// grid integral drops by exactly delta and the result stays nonnegative.
CutResult cut_with_gamma(const MassProfile& v, double delta);
MassProfile cut(const MassProfile& v, double delta);

/// Remove the integral between depth Delta and Delta + delta.
MassProfile cut_band(const MassProfile& v, double Delta, double delta);

struct OrderCertificate {
    bool holds = true;
    double worst_r = 0.0;
    double worst_gap = 0.0;  // max_r V(r) - U(r) - ell
    double tolerance = 0.0;
};

/// Checks V(r) <= U(r) + ell + tol at every node, where U, V are the
/// antiderivatives of u and v. Default tol is 3h max(sup u, sup v).
OrderCertificate precede_mod(const MassProfile& u, const MassProfile& v, double ell,
                             std::optional<double> tol = std::nullopt);

/// Right-continuous step CDF of mu sampled at the nodes of grid.
MassProfile cdf_of_points(const PointMeasure& mu, const Grid& grid);

}  // namespace atlas
