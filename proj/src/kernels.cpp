#include "atlasfbp/kernels.hpp"

#include <cmath>

#include "atlasfbp/errors.hpp"

namespace atlas {

namespace {

// E[(W - a)_+] for W ~ N(0, delta)
double ramp_mean(double a, double sd) {
    double z = a / sd;
    double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    return sd * pdf - a * 0.5 * std::erfc(z / std::sqrt(2.0));
}

inline double node_sum(const double* e, const double* w, int K) {
    double s = w[0] * e[0];
    for (int k = 1; k <= K; ++k) s += w[k] * (e[-k] + e[k]);
    return s;
}

}  // namespace

HatKernel hat_kernel(double delta, double h, double radius_sigmas) {
    if (!(delta > 0.0)) throw DomainError("smoothing time must be positive");
    if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
    HatKernel k;
    const double sd = std::sqrt(delta);
    k.K = static_cast<int>(std::ceil(radius_sigmas * sd / h)) + 1;
    k.mass_error = std::erfc(radius_sigmas / std::sqrt(2.0));
    k.w.resize(static_cast<std::size_t>(k.K) + 1);
    const double r0 = ramp_mean(0.0, sd);
    const double r1 = ramp_mean(h, sd);
    k.w[0] = 1.0 + 2.0 * (r1 - r0) / h;
    double prev = r0, cur = r1;
    for (int j = 1; j <= k.K; ++j) {
        double next = ramp_mean(static_cast<double>(j + 1) * h, sd);
        k.w[static_cast<std::size_t>(j)] = (prev - 2.0 * cur + next) / h;
        prev = cur;
        cur = next;
    }
    return k;
}

void convolve_serial(const std::vector<double>& ext, const HatKernel& k, std::vector<double>& out,
                     std::size_t i_begin, std::size_t i_end) {
    const double* w = k.w.data();
    const double* base = ext.data() + k.K;
    for (std::size_t i = i_begin; i < i_end; ++i) out[i] = node_sum(base + i, w, k.K);
}

void convolve_parallel(const std::vector<double>& ext, const HatKernel& k, std::vector<double>& out,
                       std::size_t i_begin, std::size_t i_end) {
    const double* w = k.w.data();
    const double* base = ext.data() + k.K;
    const auto b = static_cast<long>(i_begin);
    const auto e = static_cast<long>(i_end);
#pragma omp parallel for schedule(static)
    for (long i = b; i < e; ++i) out[static_cast<std::size_t>(i)] = node_sum(base + i, w, k.K);
}

}  // namespace atlas
