#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "atlasfbp/mass_profile.hpp"

namespace atlas {

/// Initial cumulative mass v0, zero on (-inf, 0].
struct InitialDescriptor {
    enum class Model { linear, power, table };

    Model model = Model::linear;
    double lambda = 2.0;           // linear: v0 = lambda x_+
    double c = 1.0, p = 1.0;       // power: v0 = c x_+^p
    std::vector<double> table_x;   // table: piecewise linear through (x_k, v_k), x_0 = 0, v_0 = 0
    std::vector<double> table_v;
    std::optional<double> lambda0_floor;

    static InitialDescriptor linear(double lambda);
    static InitialDescriptor power(double c, double p);
    static InitialDescriptor table(std::vector<double> xs, std::vector<double> vs);

    void validate() const;
    double v0(double x) const;
    /// Smallest x with v0(x) = m.
    double inverse(double m) const;
    TailModel tail() const;
    MassProfile profile(const Grid& g) const;
    /// v0(x) >= lambda0 x at every nonnegative node of g (true when no floor is declared).
    bool floor_holds(const Grid& g) const;
    std::string name() const;
};

/// Poisson process with intensity n dv0: x_i = v0^{-1}(Gamma_i / n), stopped at x_cov.
std::vector<double> sample_ppp(const InitialDescriptor& d, int n, std::uint64_t seed, double x_cov);

/// x_i = f(i / n) for i = 0 .. count - 1; f must be strictly increasing with f(0) = 0.
std::vector<double> sample_deterministic(const std::function<double(double)>& f, int n, std::size_t count);

/// Number of particles needed to cover [0, x_cov]: ceil(n v0(x_cov)).
std::size_t coverage_count(const InitialDescriptor& d, int n, double x_cov);

using InitialSampler = std::function<std::vector<double>(int n, std::uint64_t seed)>;

/// Constants of the Poisson tail recipe: with s_j = int_j^{j+1} dv0 <= alpha (1 + j^m),
/// a = e^alpha - 1, C = e^{alpha a}, c = alpha.
struct TailConstants {
    double alpha = 0.0;
    double a = 0.0;
    double C = 0.0;
    double c = 0.0;
};

TailConstants tail_constants(const InitialDescriptor& d, double m, int j_max = 1000);

struct TailCell {
    int n = 0;
    int j = 0;
    double y = 0.0;
    double bound = 0.0;      // C e^{-c y}
    double frequency = 0.0;  // empirical exceedance
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    bool pass = true;        // wilson_lo <= bound
};

struct TailBoundReport {
    std::vector<TailCell> cells;
    bool pass = true;
    int trials = 0;
};

/// Wilson score interval for k successes out of n at normal quantile z.
std::pair<double, double> wilson_interval(int k, int n, double z = 1.96);

/// Empirical P(mu[j, j+1] / (1 + j^m) > y) against C e^{-c y} on a lattice of (n, j, y).
TailBoundReport check_tail_bound(const InitialSampler& sampler, const std::vector<int>& n_list, double m,
                                 double C, double c, int trials, std::uint64_t seed = 1, int j_max = 3,
                                 std::vector<double> y_grid = {1.0, 2.0, 3.0, 4.0, 6.0, 8.0});

}  // namespace atlas
