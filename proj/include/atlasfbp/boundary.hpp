#pragma once

#include <span>
#include <vector>

namespace atlas {

/// Free boundary sampled at increasing times, piecewise linear in between.
struct BoundaryPath {
    std::vector<double> times;
    std::vector<double> values;

    BoundaryPath() = default;
    BoundaryPath(std::vector<double> t, std::vector<double> v);

    static BoundaryPath constant(double value, double T, int cells = 1);

    double operator()(double t) const;
    double t_end() const { return times.empty() ? 0.0 : times.back(); }
    double sup_abs() const;
};

/// int_{t_from}^{t} p_{t-s}(sigma_s - x) ds for piecewise linear sigma.
/// Each path cell is integrated in u = sqrt(t - s), which removes the
/// endpoint singularity; cells reaching s = t are split geometrically in u.
double boundary_potential(const BoundaryPath& sigma, double t, double x, double t_from = 0.0);
double boundary_potential(std::span<const double> times, std::span<const double> values, double t,
                          double x, double t_from = 0.0);

/// Space-time histogram of a boundary measure; mass is stored row-major as
/// mass[j * (x_edges.size() - 1) + i] for time bin j and space bin i.
struct BoundaryHistogram {
    std::vector<double> x_edges;
    std::vector<double> t_edges;
    std::vector<double> mass;

    BoundaryHistogram() = default;
    BoundaryHistogram(std::vector<double> xe, std::vector<double> te);

    std::size_t nx() const { return x_edges.size() - 1; }
    std::size_t nt() const { return t_edges.size() - 1; }
    double& at(std::size_t j, std::size_t i) { return mass[j * nx() + i]; }
    double at(std::size_t j, std::size_t i) const { return mass[j * nx() + i]; }
    /// Space bin holding x; points outside are clamped to the end bins.
    std::size_t x_bin(double x) const;
    std::size_t t_bin(double t) const;
    /// Total mass in time bins [0, j].
    double slab_mass(std::size_t j) const;
    double total() const;
};

/// Uniform edges a, a + w, ..., covering [a, b].
std::vector<double> uniform_edges(double a, double b, double width);

/// Occupation measure delta_{sigma_t}(dx) dt of a path, deposited on the histogram.
/// Each time slab receives exactly its length.
BoundaryHistogram path_to_histogram(const BoundaryPath& sigma, std::vector<double> x_edges,
                                    std::vector<double> t_edges);

}  // namespace atlas
