#include "atlasfbp/heat_semigroup.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "atlasfbp/errors.hpp"

namespace atlas {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double heat_kernel(double t, double x) {
    if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
    return normal_pdf(x / std::sqrt(t)) / std::sqrt(t);
}

double ramp_smoothed(double t, double x) {
    double sd = std::sqrt(t);
    double z = x / sd;
    return x * normal_sf(-z) + sd * normal_pdf(z);
}

MassProfile smooth(const MassProfile& v, double delta, Exec exec, const KernelSpec& spec) {
    const Grid& g = v.grid;
    HatKernel k = hat_kernel(delta, g.h, spec.truncation_radius_sigmas);
    const auto K = static_cast<std::size_t>(k.K);
    const std::size_t n = g.count;
    if (g.x_hi() + static_cast<double>(K) * g.h > v.tail.valid_to)
        throw OverflowError("smoothing reaches past the tail model's validity; widen the window");

    // zeros left of the grid, nodal values, then tail samples at virtual nodes
    std::vector<double> ext(n + 2 * K, 0.0);
    std::copy(v.values.begin(), v.values.end(), ext.begin() + static_cast<std::ptrdiff_t>(K));
    for (std::size_t j = 0; j < K; ++j)
        ext[K + n + j] = v.tail.eval(g.x_hi() + static_cast<double>(j + 1) * g.h);

    std::vector<double> out(n, 0.0);
    std::size_t i0 = v.first_nonzero();
    std::size_t begin = i0 > K ? i0 - K : 0;
    if (i0 == n) begin = v.tail.kind == TailModel::Kind::zero ? n : (n > K ? n - K : 0);
    convolve(exec, ext, k, out, begin, n);
    // flush the far-left Gaussian tail at the kernel truncation level so the
    // support does not creep by K nodes per step
    const double floor = 1e-15 * v.sup();
    for (std::size_t i = begin; i < n && std::abs(out[i]) <= floor; ++i) out[i] = 0.0;
    return MassProfile(g, std::move(out), v.tail.smoothed(delta));
}

InitialSmoother::InitialSmoother(const MassProfile& v0) : v0_(v0) {
    const Grid& g = v0_.grid;
    const auto& y = v0_.values;
    jump_ = y[0];
    double prev = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) scale = std::max(scale, std::abs(y[i + 1] - y[i]) / g.h);
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        double slope = (y[i + 1] - y[i]) / g.h;
        double s = slope - prev;
        if (std::abs(s) > 1e-12 * scale) {
            kink_x_.push_back(g.x(i));
            kink_s_.push_back(s);
            prev += s;
        }
    }
    last_slope_ = prev;
    prefix_s_.assign(kink_x_.size() + 1, 0.0);
    prefix_sx_.assign(kink_x_.size() + 1, 0.0);
    for (std::size_t i = 0; i < kink_x_.size(); ++i) {
        prefix_s_[i + 1] = prefix_s_[i] + kink_s_[i];
        prefix_sx_[i + 1] = prefix_sx_[i] + kink_s_[i] * kink_x_[i];
    }
}

double InitialSmoother::tail_correction(double t, double x) const {
    const Grid& g = v0_.grid;
    const double sd = std::sqrt(t);
    const double reach = 10.0 * sd;
    if (x + reach <= g.x_hi()) return 0.0;
    const double a = std::max(g.x_hi(), x - reach);
    const double b = std::min(x + reach, v0_.tail.valid_to);
    if (!(b > a)) return 0.0;
    const double yb = v0_.values.back();
    auto integrand = [&](double y) {
        double pl = yb + last_slope_ * (y - g.x_hi());
        return normal_pdf((y - x) / sd) / sd * (v0_.tail.eval(y) - pl);
    };
    using Rule = boost::math::quadrature::gauss<double, 20>;
    constexpr int panels = 8;
    double w = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) s += Rule::integrate(integrand, a + p * w, a + (p + 1) * w);
    return s;
}

double InitialSmoother::operator()(double t, double x) const {
    if (!(t > 0.0)) throw DomainError("smooth_initial needs t > 0");
    const double sd = std::sqrt(t);
    const double reach = 10.0 * sd;
    double s = jump_ * normal_sf((v0_.grid.x_lo - x) / sd);
    // kinks far to the left act as exact linear functions; far to the right they vanish
    auto lo = std::lower_bound(kink_x_.begin(), kink_x_.end(), x - reach) - kink_x_.begin();
    auto hi = std::upper_bound(kink_x_.begin(), kink_x_.end(), x + reach) - kink_x_.begin();
    s += x * prefix_s_[static_cast<std::size_t>(lo)] - prefix_sx_[static_cast<std::size_t>(lo)];
    for (auto i = static_cast<std::size_t>(lo); i < static_cast<std::size_t>(hi); ++i)
        s += kink_s_[i] * ramp_smoothed(t, x - kink_x_[i]);
    return s + tail_correction(t, x);
}

double smooth_initial(const MassProfile& v0, double t, double x) {
    return InitialSmoother(v0)(t, x);
}

}  // namespace atlas
