#pragma once

#include <cstddef>
#include <vector>

namespace atlas {

enum class Exec { serial, parallel };

/// Weights of S_delta acting on the piecewise linear interpolant of nodal values:
/// (S_delta v)(x_i) = sum_{|k| <= K} w[|k|] v_{i+k}.
struct HatKernel {
    std::vector<double> w;  // w[0..K]
    int K = 0;
    double mass_error = 0.0;  // erfc(radius / sqrt 2), mass outside the truncation
};

HatKernel hat_kernel(double delta, double h, double radius_sigmas = 8.0);

/// out[i] = sum_{k=-K}^{K} w[|k|] ext[i + K + k] for i in [i_begin, i_end).
/// ext holds the K padded nodes on both sides. Both variants use the same
/// per-node summation order, so their results are bit-identical.
void convolve_serial(const std::vector<double>& ext, const HatKernel& k, std::vector<double>& out,
                     std::size_t i_begin, std::size_t i_end);
void convolve_parallel(const std::vector<double>& ext, const HatKernel& k, std::vector<double>& out,
                       std::size_t i_begin, std::size_t i_end);

inline void convolve(Exec e, const std::vector<double>& ext, const HatKernel& k,
                     std::vector<double>& out, std::size_t i_begin, std::size_t i_end) {
    if (e == Exec::parallel)
        convolve_parallel(ext, k, out, i_begin, i_end);
    else
        convolve_serial(ext, k, out, i_begin, i_end);
}

}  // namespace atlas
