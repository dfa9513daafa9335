#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace atlas {

/// Uniform node set x_lo, x_lo + h, ..., x_lo + (count-1) h.
struct Grid {
    double x_lo = 0.0;
    double h = 1.0;
    std::size_t count = 2;

    Grid() = default;
    Grid(double x_lo_, double h_, std::size_t count_);

    /// Smallest grid with spacing h covering [a, b]; a is the first node.
    static Grid covering(double a, double b, double h);

    double x(std::size_t i) const { return x_lo + static_cast<double>(i) * h; }
    double x_hi() const { return x(count - 1); }
    std::vector<double> nodes() const;

    bool same_as(const Grid& other) const;
};

/// Analytic right tail used beyond x_hi.
///
/// linear:     c0 + c1 x
/// power:      c x^p            (coeffs = {c, p})
/// polynomial: sum_k a_k x^k    (coeffs = {a_0, a_1, ...})
struct TailModel {
    enum class Kind { zero, linear, power, polynomial };

    Kind kind = Kind::zero;
    std::vector<double> coeffs;
    double valid_to = std::numeric_limits<double>::infinity();

    static TailModel zero();
    static TailModel linear(double c0, double c1);
    static TailModel power(double c, double p);
    static TailModel polynomial(std::vector<double> a);

    double eval(double x) const;
    /// Integral of the tail over [a, b].
    double integral(double a, double b) const;
    /// Tail of S_delta applied to this tail (exact for polynomial kinds).
    TailModel smoothed(double delta) const;
    /// Same function written in polynomial form, if it is one.
    bool as_polynomial(std::vector<double>& a) const;
};

}  // namespace atlas
