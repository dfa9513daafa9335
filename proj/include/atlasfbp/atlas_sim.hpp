#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "atlasfbp/boundary.hpp"
#include "atlasfbp/kernels.hpp"
#include "atlasfbp/mass_profile.hpp"
#include "atlasfbp/rng.hpp"

namespace atlas {

struct SimConfig {
    int n = 1;             // drift given to the leftmost particle; empirical weight 1/n
    double dt = 0.0;       // 0 selects T / 20000
    double T = 0.25;
    std::size_t N_total = 0;  // 0 keeps every initial particle
    double window_width = 0.5;
    std::uint64_t seed = 1;
    std::vector<double> checkpoint_times;
    int record_stride = 1;
    int refresh_every = 25;
    double beta_x_lo = -1.0;
    double beta_x_hi = 1.0;
    double beta_dx = 0.02;
    int beta_t_bins = 50;
    Exec exec = Exec::parallel;

    double step_size() const { return dt > 0.0 ? dt : T / 20000.0; }
    int steps() const;
    void validate() const;
};

/// Named particles with an active window. Frozen particles keep the position
/// they had at time t_valid[i] and are advanced by one exact Gaussian when
/// they are reactivated or observed.
struct Ensemble {
    std::vector<double> x;
    std::vector<double> t_valid;
    std::vector<std::uint8_t> active;
    std::vector<std::uint64_t> counter;
    std::vector<std::size_t> active_idx;  // ascending
    CounterRng rng;
    double t = 0.0;
    double window_width = 0.5;
    std::size_t lead = 0;  // current leftmost among active particles

    double freeze_bound = 0.0;  // accumulated probability that a frozen particle was leftmost
    long reactivations = 0;
    double drift_total = 0.0;

    Ensemble(std::vector<double> positions, std::uint64_t seed, double window_width);

    /// Bring particle i to the current time with an exact Gaussian increment.
    void catch_up(std::size_t i);
    /// Freeze particles far above the minimum and reactivate those that may come near it.
    void refresh(double horizon);
    void rebuild_active();
    void find_lead();
};

struct StepInfo {
    std::size_t lead = 0;   // leftmost before the step
    double lead_x = 0.0;
};

/// One Euler-Maruyama step: drift n on the leftmost active particle and
/// N(0, dt) increments on every active particle.
StepInfo step(Ensemble& e, double dt, int n, Exec exec = Exec::parallel);

/// Argmin of the stored positions, lowest index on ties.
std::pair<std::size_t, double> leftmost(const Ensemble& e);
std::pair<std::size_t, double> leftmost(const std::vector<double>& x);

/// Consecutive differences of the sorted positions.
std::vector<double> gaps(const Ensemble& e);
std::vector<double> gaps(std::vector<double> x);

struct PathRecord {
    BoundaryPath Y0;
    BoundaryHistogram beta_hist;
    std::vector<double> checkpoint_times;
    std::vector<PointMeasure> checkpoints;
    std::vector<double> gaps0;
    double dt = 0.0;
    int steps = 0;
    double drift_total = 0.0;
    double freeze_bound = 0.0;
    double truncation_bound = 0.0;  // expected number of omitted far particles reaching sup Y0
    double max_min_drop = 0.0;      // largest fall of the minimum within one refresh interval
    long reactivations = 0;
    std::size_t max_active = 0;
};

/// Run Atlas(n) from the sorted initial configuration to T.
PathRecord simulate(std::vector<double> init, const SimConfig& config);

}  // namespace atlas
