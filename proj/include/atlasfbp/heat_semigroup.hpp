#pragma once

#include <vector>

#include "atlasfbp/kernels.hpp"
#include "atlasfbp/mass_profile.hpp"

namespace atlas {

struct KernelSpec {
    double truncation_radius_sigmas = 8.0;
    int quadrature_order = 20;
};

/// Gaussian density with variance t.
double heat_kernel(double t, double x);

/// Standard normal density and upper tail.
double normal_pdf(double z);
double normal_sf(double z);

/// E[(x + W_t)_+] with W_t ~ N(0, t).
double ramp_smoothed(double t, double x);

/// Node-wise S_delta v, exact for the piecewise linear interpolant of v
/// (up to kernel truncation). Tail nodes past x_hi come from v.tail.
MassProfile smooth(const MassProfile& v, double delta, Exec exec = Exec::parallel,
                   const KernelSpec& spec = {});

/// Pointwise S_t v0(x) for arbitrary (x, t). The piecewise linear part is
/// written as a sum of ramps at its kinks; the tail correction is integrated
/// against the Gaussian by composite Gauss-Legendre quadrature.
class InitialSmoother {
public:
    explicit InitialSmoother(const MassProfile& v0);
    double operator()(double t, double x) const;

private:
    double tail_correction(double t, double x) const;

    MassProfile v0_;
    double jump_ = 0.0;  // value at x_lo, switched on by a step
    std::vector<double> kink_x_;
    std::vector<double> kink_s_;
    std::vector<double> prefix_s_;   // sum of slope changes of kinks [0, i)
    std::vector<double> prefix_sx_;  // sum of s_i x_i
    double last_slope_ = 0.0;
};

double smooth_initial(const MassProfile& v0, double t, double x);

}  // namespace atlas
