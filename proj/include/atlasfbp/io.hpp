#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atlasfbp/atlas_sim.hpp"
#include "atlasfbp/boundary.hpp"
#include "atlasfbp/initial_conditions.hpp"
#include "atlasfbp/mass_profile.hpp"

namespace atlas {

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Shortest decimal that round-trips the double.
std::string fmt_double(double x);

/// Parse a JSON document; syntax errors become ConfigError with line and column.
Json parse_json_text(const std::string& text, const std::string& origin);
Json load_json(const std::filesystem::path& path);

/// Typed field access with "a.b.c" key paths in the error message.
class Fields {
public:
    Fields(const Json& j, std::string where);

    double number(const char* key, std::optional<double> fallback = std::nullopt) const;
    long long integer(const char* key, std::optional<long long> fallback = std::nullopt) const;
    bool flag(const char* key, std::optional<bool> fallback = std::nullopt) const;
    std::string text(const char* key, std::optional<std::string> fallback = std::nullopt) const;
    std::vector<double> numbers(const char* key, std::optional<std::vector<double>> fallback = std::nullopt) const;
    bool has(const char* key) const { return j_.contains(key); }
    Fields sub(const char* key) const;
    const Json& raw(const char* key) const;
    /// Reject keys outside `allowed`.
    void only(std::initializer_list<const char*> allowed) const;

private:
    const Json& at(const char* key) const;
    std::string path(const char* key) const;

    const Json& j_;
    std::string where_;
};

InitialDescriptor parse_descriptor(const Fields& f);
Json to_json(const InitialDescriptor& d);

/// Solver run: both schemes on v0 to T.
struct SolveJob {
    InitialDescriptor init;
    double T = 0.25;
    double h = 1e-3;
    double delta = 1e-3;
    double Delta = 0.1;
    std::optional<double> t0;
    bool run_lower = true;
    int mild_steps = 400;
    std::vector<std::string> solvers{"splitting", "mild"};
    std::vector<double> profile_times;  // empty means {T}
    double out_x_lo = -1.0;
    double out_x_hi = 2.0;
};

SolveJob parse_solve(const Json& j);
Json to_json(const SolveJob& s);

/// Particle run; replica r uses seed + r.
struct SimulateJob {
    InitialDescriptor init;
    std::string sampler = "ppp";  // or "lattice"
    SimConfig sim;
    int replicas = 1;
    double x_cov = 0.0;  // 0 selects 5 + 8 sqrt T
};

SimulateJob parse_simulate(const Json& j);
Json to_json(const SimConfig& c);
Json to_json(const SimulateJob& s);

/// Initial configuration of one replica.
std::vector<double> initial_positions(const SimulateJob& job, std::uint64_t seed);

/// CSV writers. Every file starts with a "# config_digest=..." line.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& digest, const std::string& header);
    CsvWriter& row(std::initializer_list<double> cells);
    void close();

private:
    std::string buf_;
    std::filesystem::path path_;
};

void write_path_csv(const std::filesystem::path& p, const std::string& digest, const BoundaryPath& path,
                    const char* value_name);
void write_histogram_csv(const std::filesystem::path& p, const std::string& digest, const BoundaryHistogram& h);
void write_points_csv(const std::filesystem::path& p, const std::string& digest, const std::vector<double>& x);
/// Profile values on [x_lo, x_hi]; extra columns share the grid.
void write_profile_csv(const std::filesystem::path& p, const std::string& digest, double x_lo, double x_hi,
                       const std::vector<std::pair<std::string, const MassProfile*>>& columns);

void write_json(const std::filesystem::path& p, const Json& j);
std::string read_file(const std::filesystem::path& p);

}  // namespace atlas
