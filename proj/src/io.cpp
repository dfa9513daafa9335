#include "atlasfbp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "atlasfbp/errors.hpp"

namespace atlas {

namespace fs = std::filesystem;

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << origin << ":" << line << ":" << col << ": malformed JSON";
        throw ConfigError(os.str());
    }
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Json load_json(const fs::path& path) { return parse_json_text(read_file(path), path.string()); }

Fields::Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError((where_.empty() ? "config" : where_) + ": expected an object");
}

std::string Fields::path(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

const Json& Fields::at(const char* key) const { return j_.at(key); }

const Json& Fields::raw(const char* key) const {
    if (!has(key)) throw ConfigError("missing key '" + path(key) + "'");
    return at(key);
}

double Fields::number(const char* key, std::optional<double> fallback) const {
    if (!has(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing key '" + path(key) + "'");
    }
    const Json& v = at(key);
    if (!v.is_number()) throw ConfigError("key '" + path(key) + "': expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("key '" + path(key) + "': not finite");
    return x;
}

long long Fields::integer(const char* key, std::optional<long long> fallback) const {
    if (!has(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing key '" + path(key) + "'");
    }
    const Json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError("key '" + path(key) + "': expected an integer");
    return v.get<long long>();
}

bool Fields::flag(const char* key, std::optional<bool> fallback) const {
    if (!has(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing key '" + path(key) + "'");
    }
    const Json& v = at(key);
    if (!v.is_boolean()) throw ConfigError("key '" + path(key) + "': expected true or false");
    return v.get<bool>();
}

std::string Fields::text(const char* key, std::optional<std::string> fallback) const {
    if (!has(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing key '" + path(key) + "'");
    }
    const Json& v = at(key);
    if (!v.is_string()) throw ConfigError("key '" + path(key) + "': expected a string");
    return v.get<std::string>();
}

std::vector<double> Fields::numbers(const char* key, std::optional<std::vector<double>> fallback) const {
    if (!has(key)) {
        if (fallback) return *fallback;
        throw ConfigError("missing key '" + path(key) + "'");
    }
    const Json& v = at(key);
    if (!v.is_array()) throw ConfigError("key '" + path(key) + "': expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("key '" + path(key) + "': expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

Fields Fields::sub(const char* key) const {
    if (!has(key)) throw ConfigError("missing key '" + path(key) + "'");
    return Fields(at(key), path(key));
}

void Fields::only(std::initializer_list<const char*> allowed) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError("unknown key '" + path(it.key().c_str()) + "'");
    }
}

InitialDescriptor parse_descriptor(const Fields& f) {
    f.only({"model", "lambda", "c", "p", "x", "v", "lambda0_floor"});
    std::string model = f.text("model");
    InitialDescriptor d;
    if (model == "linear") {
        d.model = InitialDescriptor::Model::linear;
        d.lambda = f.number("lambda");
    } else if (model == "power") {
        d.model = InitialDescriptor::Model::power;
        d.c = f.number("c");
        d.p = f.number("p");
    } else if (model == "table") {
        d.model = InitialDescriptor::Model::table;
        d.table_x = f.numbers("x");
        d.table_v = f.numbers("v");
    } else {
        throw ConfigError("key 'initial.model': expected linear, power or table");
    }
    if (f.has("lambda0_floor")) d.lambda0_floor = f.number("lambda0_floor");
    d.validate();
    return d;
}

Json to_json(const InitialDescriptor& d) {
    Json j;
    j["model"] = d.name();
    switch (d.model) {
        case InitialDescriptor::Model::linear: j["lambda"] = d.lambda; break;
        case InitialDescriptor::Model::power:
            j["c"] = d.c;
            j["p"] = d.p;
            break;
        case InitialDescriptor::Model::table:
            j["x"] = d.table_x;
            j["v"] = d.table_v;
            break;
    }
    if (d.lambda0_floor) j["lambda0_floor"] = *d.lambda0_floor;
    return j;
}

SolveJob parse_solve(const Json& j) {
    Fields f(j, "");
    f.only({"initial", "T", "h", "delta", "Delta", "t0", "run_lower", "mild_steps", "solvers", "profile_times",
            "out_x_lo", "out_x_hi"});
    SolveJob s;
    s.init = parse_descriptor(f.sub("initial"));
    s.T = f.number("T", s.T);
    s.h = f.number("h", s.h);
    s.delta = f.number("delta", s.delta);
    s.Delta = f.number("Delta", s.Delta);
    if (f.has("t0")) s.t0 = f.number("t0");
    s.run_lower = f.flag("run_lower", s.run_lower);
    s.mild_steps = static_cast<int>(f.integer("mild_steps", s.mild_steps));
    if (f.has("solvers")) {
        const Json& a = j.at("solvers");
        if (!a.is_array()) throw ConfigError("key 'solvers': expected an array of strings");
        s.solvers.clear();
        for (const auto& e : a) {
            if (!e.is_string() || (e != "splitting" && e != "mild"))
                throw ConfigError("key 'solvers': entries must be \"splitting\" or \"mild\"");
            s.solvers.push_back(e.get<std::string>());
        }
    }
    s.profile_times = f.numbers("profile_times", std::vector<double>{s.T});
    s.out_x_lo = f.number("out_x_lo", s.out_x_lo);
    s.out_x_hi = f.number("out_x_hi", s.out_x_hi);

    if (!(s.T > 0.0) || !(s.h > 0.0) || !(s.delta > 0.0) || !(s.Delta > 0.0))
        throw ConfigError("T, h, delta and Delta must be positive");
    if (s.mild_steps < 1) throw ConfigError("key 'mild_steps': must be >= 1");
    if (!(s.out_x_hi > s.out_x_lo)) throw ConfigError("out_x_hi must exceed out_x_lo");
    for (double t : s.profile_times)
        if (!(t > 0.0) || t > s.T * (1.0 + 1e-12)) throw ConfigError("key 'profile_times': values must lie in (0, T]");
    return s;
}

Json to_json(const SolveJob& s) {
    Json j;
    j["initial"] = to_json(s.init);
    j["T"] = s.T;
    j["h"] = s.h;
    j["delta"] = s.delta;
    j["Delta"] = s.Delta;
    j["t0"] = s.t0 ? *s.t0 : 2.0 * s.delta;
    j["run_lower"] = s.run_lower;
    j["mild_steps"] = s.mild_steps;
    j["solvers"] = s.solvers;
    j["profile_times"] = s.profile_times;
    j["out_x_lo"] = s.out_x_lo;
    j["out_x_hi"] = s.out_x_hi;
    return j;
}

SimulateJob parse_simulate(const Json& j) {
    Fields f(j, "");
    f.only({"initial", "sampler", "n", "T", "dt", "seed", "replicas", "x_cov", "N_total", "window_width",
            "checkpoint_times", "record_stride", "refresh_every", "beta"});
    SimulateJob s;
    s.init = parse_descriptor(f.sub("initial"));
    s.sampler = f.text("sampler", s.sampler);
    if (s.sampler != "ppp" && s.sampler != "lattice") throw ConfigError("key 'sampler': expected ppp or lattice");
    SimConfig& c = s.sim;
    c.n = static_cast<int>(f.integer("n"));
    c.T = f.number("T", c.T);
    c.dt = f.number("dt", c.T / 20000.0);
    long long seed = f.integer("seed", 1);
    if (seed < 0) throw ConfigError("key 'seed': must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);
    s.replicas = static_cast<int>(f.integer("replicas", 1));
    if (s.replicas < 1) throw ConfigError("key 'replicas': must be >= 1");
    s.x_cov = f.number("x_cov", 5.0 + 8.0 * std::sqrt(c.T));
    long long nt = f.integer("N_total", 0);
    if (nt < 0) throw ConfigError("key 'N_total': must be nonnegative");
    c.N_total = static_cast<std::size_t>(nt);
    c.window_width = f.number("window_width", c.window_width);
    c.checkpoint_times = f.numbers("checkpoint_times", std::vector<double>{0.0, c.T});
    c.record_stride = static_cast<int>(f.integer("record_stride", 10));
    c.refresh_every = static_cast<int>(f.integer("refresh_every", c.refresh_every));
    if (f.has("beta")) {
        Fields b = f.sub("beta");
        b.only({"x_lo", "x_hi", "dx", "t_bins"});
        c.beta_x_lo = b.number("x_lo", c.beta_x_lo);
        c.beta_x_hi = b.number("x_hi", c.beta_x_hi);
        c.beta_dx = b.number("dx", c.beta_dx);
        c.beta_t_bins = static_cast<int>(b.integer("t_bins", c.beta_t_bins));
    }
    c.validate();
    if (!(s.x_cov > 0.0)) throw ConfigError("key 'x_cov': must be positive");
    return s;
}

Json to_json(const SimConfig& c) {
    Json j;
    j["n"] = c.n;
    j["T"] = c.T;
    j["dt"] = c.T / c.steps();
    j["seed"] = c.seed;
    j["N_total"] = c.N_total;
    j["window_width"] = c.window_width;
    j["checkpoint_times"] = c.checkpoint_times;
    j["record_stride"] = c.record_stride;
    j["refresh_every"] = c.refresh_every;
    j["beta"] = {{"x_lo", c.beta_x_lo}, {"x_hi", c.beta_x_hi}, {"dx", c.beta_dx}, {"t_bins", c.beta_t_bins}};
    return j;
}

Json to_json(const SimulateJob& s) {
    Json j;
    j["initial"] = to_json(s.init);
    j["sampler"] = s.sampler;
    Json c = to_json(s.sim);
    for (auto it = c.begin(); it != c.end(); ++it) j[it.key()] = it.value();
    j["replicas"] = s.replicas;
    j["x_cov"] = s.x_cov;
    return j;
}

std::vector<double> initial_positions(const SimulateJob& job, std::uint64_t seed) {
    if (job.sampler == "ppp") return sample_ppp(job.init, job.sim.n, seed, job.x_cov);
    const InitialDescriptor& d = job.init;
    std::size_t count = coverage_count(d, job.sim.n, job.x_cov);
    return sample_deterministic([&](double u) { return d.inverse(u); }, job.sim.n, count);
}

CsvWriter::CsvWriter(const fs::path& path, const std::string& digest, const std::string& header) : path_(path) {
    buf_ = "# config_digest=" + digest + "\n" + header + "\n";
}

CsvWriter& CsvWriter::row(std::initializer_list<double> cells) {
    bool first = true;
    for (double c : cells) {
        if (!first) buf_ += ',';
        buf_ += fmt_double(c);
        first = false;
    }
    buf_ += '\n';
    return *this;
}

void CsvWriter::close() {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path_.string());
    out << buf_;
}

void write_path_csv(const fs::path& p, const std::string& digest, const BoundaryPath& path, const char* value_name) {
    CsvWriter w(p, digest, std::string("t,") + value_name);
    for (std::size_t k = 0; k < path.times.size(); ++k) w.row({path.times[k], path.values[k]});
    w.close();
}

void write_histogram_csv(const fs::path& p, const std::string& digest, const BoundaryHistogram& h) {
    CsvWriter w(p, digest, "x_bin,t_bin,mass");
    for (std::size_t j = 0; j < h.nt(); ++j)
        for (std::size_t i = 0; i < h.nx(); ++i)
            if (h.at(j, i) != 0.0) w.row({static_cast<double>(i), static_cast<double>(j), h.at(j, i)});
    w.close();
}

void write_points_csv(const fs::path& p, const std::string& digest, const std::vector<double>& x) {
    CsvWriter w(p, digest, "x");
    for (double v : x) w.row({v});
    w.close();
}

void write_profile_csv(const fs::path& p, const std::string& digest, double x_lo, double x_hi,
                       const std::vector<std::pair<std::string, const MassProfile*>>& columns) {
    if (columns.empty()) throw UsageError("write_profile_csv needs at least one column");
    const Grid& g = columns.front().second->grid;
    std::string header = "x";
    for (const auto& c : columns) {
        if (!c.second->grid.same_as(g)) throw UsageError("profile columns must share a grid");
        header += "," + c.first;
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw UsageError("cannot write " + p.string());
    out << "# config_digest=" << digest << "\n" << header << "\n";
    for (std::size_t i = 0; i < g.count; ++i) {
        double x = g.x(i);
        if (x < x_lo - 1e-12 || x > x_hi + 1e-12) continue;
        out << fmt_double(x);
        for (const auto& c : columns) out << ',' << fmt_double(c.second->values[i]);
        out << '\n';
    }
}

void write_json(const fs::path& p, const Json& j) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw UsageError("cannot write " + p.string());
    out << j.dump(2) << "\n";
}

}  // namespace atlas
