#include "atlasfbp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>

#include <omp.h>

#include <CLI11.hpp>

#include "atlasfbp/errors.hpp"
#include "atlasfbp/mild_solver.hpp"
#include "atlasfbp/splitting_solver.hpp"
#include "atlasfbp/verify.hpp"

#ifndef ATLASFBP_VERSION
#define ATLASFBP_VERSION "dev"
#endif

namespace atlas {

namespace fs = std::filesystem;

std::string artifact_version() { return ATLASFBP_VERSION; }

Json RunManifest::to_json(const fs::path& out_dir) const {
    Json j;
    j["command"] = command;
    j["artifact_version"] = version;
    j["config_digest"] = config_digest;
    j["seed"] = seed;
    j["config"] = resolved_config;
    Json files = Json::array();
    for (const auto& o : outputs) files.push_back({{"path", o}, {"digest", fnv1a_hex(read_file(out_dir / o))}});
    j["outputs"] = files;
    return j;
}

namespace {

std::string digest_of(const Json& resolved) { return fnv1a_hex(resolved.dump()); }

void prepare_out(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw UsageError("cannot create output directory " + out.string() + ": " + ec.message());
}

void finish_manifest(RunManifest& m, const fs::path& out) {
    m.version = artifact_version();
    write_json(out / "manifest.json", m.to_json(out));
}

void apply_jobs(const CliOptions& opt) {
    if (opt.jobs > 0) omp_set_num_threads(opt.jobs);
}

std::string indexed(const char* stem, std::size_t k, const char* ext) {
    return std::string(stem) + "_" + std::to_string(k) + ext;
}

MassProfile initial_profile(const InitialDescriptor& d, double T, double h) {
    Grid g = default_solver_grid([&](double x) { return d.v0(x); }, T, h);
    return d.profile(g);
}

}  // namespace

int cmd_solve(const CliOptions& opt, std::ostream& log) {
    SolveJob job = parse_solve(load_json(opt.config));
    Json resolved = to_json(job);
    RunManifest m{"solve", digest_of(resolved), 0, "", resolved, {}};
    const std::string& dg = m.config_digest;
    prepare_out(opt.out);
    apply_jobs(opt);

    MassProfile v0 = initial_profile(job.init, job.T, job.h);
    Json summary;
    summary["config_digest"] = dg;

    for (const auto& solver : job.solvers) {
        if (solver == "splitting") {
            SplitConfig cfg;
            cfg.delta = job.delta;
            cfg.Delta = job.Delta;
            cfg.t0 = job.t0;
            cfg.T = job.T;
            cfg.grid = v0.grid;
            cfg.run_lower = job.run_lower;
            std::vector<int> want;
            int every = 0;
            for (double t : job.profile_times) {
                int k = static_cast<int>(std::lround(t / cfg.step_size()));
                want.push_back(k);
                every = std::gcd(every, k);
            }
            cfg.snapshot_every = every;
            EnvelopePair pair = run(v0, cfg);

            write_path_csv(opt.out / "splitting_sigma.csv", dg, pair.sigma_hat, "sigma");
            m.outputs.push_back("splitting_sigma.csv");
            Json profiles = Json::array();
            for (std::size_t i = 0; i < want.size(); ++i) {
                auto it = std::find_if(pair.snapshots.begin(), pair.snapshots.end(),
                                       [&](const Snapshot& s) { return s.step == want[i]; });
                if (it == pair.snapshots.end()) throw UsageError("profile time not on the splitting step lattice");
                std::vector<std::pair<std::string, const MassProfile*>> cols{{"upper", &it->upper}};
                if (job.run_lower) cols.emplace_back("lower", &it->lower);
                std::string name = indexed("splitting_profile", i, ".csv");
                write_profile_csv(opt.out / name, dg, job.out_x_lo, job.out_x_hi, cols);
                m.outputs.push_back(name);
                profiles.push_back({{"file", name}, {"t", it->t}});
            }
            Json s;
            s["sigma_T"] = pair.sigma_hat.values.back();
            s["profiles"] = profiles;
            s["max_sigma_jump"] = pair.max_sigma_jump;
            s["max_rho_excess"] = pair.max_rho_excess;
            s["warnings"] = pair.warnings;
            if (job.run_lower) {
                ErrorCertificate c = error_certificate(pair, std::numeric_limits<double>::infinity());
                s["certificate"] = {{"measured_gap", c.measured_gap},
                                    {"analytic_bound", c.analytic_bound},
                                    {"tolerance", c.tolerance},
                                    {"within", c.within},
                                    {"order_violations", pair.certificate_violations},
                                    {"worst_order_gap", pair.worst_certificate_gap}};
            }
            summary["splitting"] = s;
            for (const auto& w : pair.warnings) log << "warning: " << w << "\n";
        } else {
            BoundaryPath path = solve_boundary(v0, job.T, job.mild_steps);
            write_path_csv(opt.out / "mild_sigma.csv", dg, path, "sigma");
            m.outputs.push_back("mild_sigma.csv");
            InitialSmoother s0(v0);
            Grid g = Grid::covering(job.out_x_lo, job.out_x_hi, job.h);
            Json profiles = Json::array();
            for (std::size_t i = 0; i < job.profile_times.size(); ++i) {
                double t = job.profile_times[i];
                MassProfile v = duhamel_profile(s0, path, t, g);
                std::string name = indexed("mild_profile", i, ".csv");
                write_profile_csv(opt.out / name, dg, job.out_x_lo, job.out_x_hi, {{"v", &v}});
                m.outputs.push_back(name);
                profiles.push_back({{"file", name}, {"t", t}});
            }
            summary["mild"] = {{"sigma_T", path.values.back()}, {"profiles", profiles}};
        }
    }
    if (job.init.model == InitialDescriptor::Model::linear)
        summary["selfsimilar_sigma_T"] = selfsimilar_boundary(job.init.lambda) * std::sqrt(job.T);

    write_json(opt.out / "summary.json", summary);
    m.outputs.push_back("summary.json");
    finish_manifest(m, opt.out);
    log << "solve: wrote " << m.outputs.size() << " files to " << opt.out.string() << "\n";
    return exit_ok;
}

namespace {

struct ReplicaResult {
    std::uint64_t seed = 0;
    PathRecord record;
    std::size_t particles = 0;
};

std::vector<ReplicaResult> run_replicas(const SimulateJob& job, int jobs) {
    std::vector<ReplicaResult> res(static_cast<std::size_t>(job.replicas));
    std::vector<std::exception_ptr> errs(res.size());
    const int workers = std::max(1, std::min(jobs, job.replicas));
    const Exec inner = workers > 1 ? Exec::serial : Exec::parallel;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
    for (int r = 0; r < job.replicas; ++r) {
        try {
            SimConfig c = job.sim;
            c.seed = job.sim.seed + static_cast<std::uint64_t>(r);
            c.exec = inner;
            auto init = initial_positions(job, c.seed);
            res[r].seed = c.seed;
            res[r].particles = init.size();
            res[r].record = simulate(std::move(init), c);
        } catch (...) {
            errs[r] = std::current_exception();
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return res;
}

Json record_summary(const ReplicaResult& r) {
    const PathRecord& p = r.record;
    return {{"seed", r.seed},
            {"particles", r.particles},
            {"steps", p.steps},
            {"dt", p.dt},
            {"Y0_T", p.Y0.values.empty() ? 0.0 : p.Y0.values.back()},
            {"sup_abs_Y0", p.Y0.sup_abs()},
            {"drift_total", p.drift_total},
            {"freeze_bound", p.freeze_bound},
            {"truncation_bound", p.truncation_bound},
            {"max_min_drop", p.max_min_drop},
            {"reactivations", p.reactivations},
            {"max_active", p.max_active}};
}

}  // namespace

int cmd_simulate(const CliOptions& opt, std::ostream& log) {
    SimulateJob job = parse_simulate(load_json(opt.config));
    if (opt.seed) job.sim.seed = *opt.seed;
    Json resolved = to_json(job);
    RunManifest m{"simulate", digest_of(resolved), job.sim.seed, "", resolved, {}};
    const std::string& dg = m.config_digest;
    prepare_out(opt.out);
    apply_jobs(opt);

    auto results = run_replicas(job, opt.jobs);
    Json reps = Json::array();
    for (const auto& r : results) {
        std::string dir = "replica_" + std::to_string(r.seed);
        prepare_out(opt.out / dir);
        write_path_csv(opt.out / dir / "Y0.csv", dg, r.record.Y0, "Y0");
        m.outputs.push_back(dir + "/Y0.csv");
        for (std::size_t k = 0; k < r.record.checkpoints.size(); ++k) {
            std::string name = dir + "/" + indexed("checkpoint", k, ".csv");
            write_points_csv(opt.out / name, dg, r.record.checkpoints[k].atoms);
            m.outputs.push_back(name);
        }
        write_histogram_csv(opt.out / dir / "beta.csv", dg, r.record.beta_hist);
        m.outputs.push_back(dir + "/beta.csv");
        Json s = record_summary(r);
        s["config_digest"] = dg;
        s["checkpoint_times"] = r.record.checkpoint_times;
        s["beta_x_edges"] = {{"lo", job.sim.beta_x_lo}, {"hi", job.sim.beta_x_hi}, {"dx", job.sim.beta_dx}};
        s["beta_t_bins"] = job.sim.beta_t_bins;
        write_json(opt.out / dir / "record.json", s);
        m.outputs.push_back(dir + "/record.json");
        reps.push_back(record_summary(r));
    }
    write_json(opt.out / "summary.json", Json{{"config_digest", dg}, {"replicas", reps}});
    m.outputs.push_back("summary.json");
    finish_manifest(m, opt.out);
    log << "simulate: " << results.size() << " replica(s) written to " << opt.out.string() << "\n";
    return exit_ok;
}

namespace {

SuiteOptions parse_suite(const Fields& f, const CliOptions& opt) {
    f.only({"seed", "trials", "inject_fault", "solver_checks"});
    SuiteOptions s;
    long long seed = f.integer("seed", 1);
    if (seed < 0) throw ConfigError("key 'suite.seed': must be nonnegative");
    s.seed = opt.seed ? *opt.seed : static_cast<std::uint64_t>(seed);
    s.trials = static_cast<int>(f.integer("trials", s.trials));
    if (s.trials < 0) throw ConfigError("key 'trials': must be nonnegative");
    s.inject_fault = f.text("inject_fault", "");
    cut_for_fault(s.inject_fault);
    s.solver_checks = f.flag("solver_checks", true);
    return s;
}

Json suite_json(const SuiteOptions& o, const SuiteReport& r) {
    Json e = Json::array();
    for (const auto& x : r.entries)
        e.push_back({{"name", x.name}, {"trials", x.trials}, {"violations", x.violations}, {"worst", x.worst}});
    return {{"seed", o.seed},
            {"trials", o.trials},
            {"inject_fault", o.inject_fault},
            {"violations", r.violations},
            {"pass", r.pass()},
            {"entries", e}};
}

void write_suite_csv(const fs::path& p, const std::string& dg, const SuiteReport& r) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw UsageError("cannot write " + p.string());
    out << "# config_digest=" << dg << "\nname,trials,violations,worst\n";
    for (const auto& e : r.entries)
        out << e.name << ',' << e.trials << ',' << e.violations << ',' << fmt_double(e.worst) << '\n';
}

// sigma(T) of one solver on v0 = lambda x_+ against the self-similar coefficient.
Json oracle_check(const Fields& f, std::ostream& log, bool& ok) {
    f.only({"lambdas", "T", "h", "delta", "mild_steps", "tolerance_rel", "solver"});
    auto lambdas = f.numbers("lambdas", std::vector<double>{1.0, 4.0});
    double T = f.number("T", 0.25);
    double h = f.number("h", 1e-3);
    double delta = f.number("delta", 1e-3);
    int steps = static_cast<int>(f.integer("mild_steps", 400));
    double tol = f.number("tolerance_rel", 0.02);
    std::string solver = f.text("solver", "mild");
    if (solver != "mild" && solver != "splitting") throw ConfigError("key 'oracle.solver': expected mild or splitting");
    Json out = Json::array();
    for (double lam : lambdas) {
        auto d = InitialDescriptor::linear(lam);
        MassProfile v0 = initial_profile(d, T, h);
        double target = selfsimilar_boundary(lam) * std::sqrt(T);
        double got;
        if (solver == "mild") {
            got = solve_boundary(v0, T, steps).values.back();
        } else {
            SplitConfig c;
            c.delta = delta;
            c.T = T;
            c.grid = v0.grid;
            c.run_lower = false;
            got = run(v0, c).sigma_hat.values.back();
        }
        double err = std::abs(got - target);
        bool pass = target == 0.0 ? err <= tol : err <= tol * std::abs(target);
        ok = ok && pass;
        log << "oracle lambda=" << lam << " sigma(T)=" << got << " target=" << target << (pass ? " ok" : " FAIL")
            << "\n";
        out.push_back({{"lambda", lam}, {"sigma_T", got}, {"target", target}, {"pass", pass}});
    }
    return out;
}

// Particle runs against the mild-solver reference.
Json compare_check(const Fields& f, const CliOptions& opt, std::ostream& log, bool& ok) {
    f.only({"simulate", "r_max", "D2_max", "quantile", "reference_h", "mild_steps"});
    SimulateJob job = parse_simulate(f.raw("simulate"));
    if (opt.seed) job.sim.seed = *opt.seed;
    int r_max = static_cast<int>(f.integer("r_max", 4));
    double d2_max = f.number("D2_max", 0.1);
    double quantile = f.number("quantile", 0.9);
    double h = f.number("reference_h", 1e-3);
    int steps = static_cast<int>(f.integer("mild_steps", 400));
    if (r_max < 1) throw ConfigError("key 'compare.r_max': must be >= 1");

    MassProfile v0 = initial_profile(job.init, job.sim.T, h);
    PdeReference ref = mild_reference(v0, job.sim.T, steps, job.sim.checkpoint_times,
                                      Grid::covering(-1.0, r_max + 1.0, h));
    auto results = run_replicas(job, opt.jobs);
    Json reps = Json::array();
    std::vector<double> d1;
    int within = 0;
    for (const auto& r : results) {
        ComparisonReport c = compare(r.record, ref, r_max, job.sim.n, r.seed);
        d1.push_back(c.D1);
        within += c.D2 <= d2_max;
        reps.push_back({{"seed", c.seed}, {"D1", c.D1}, {"D2", c.D2}, {"beta_distance", c.beta_distance}});
    }
    std::sort(d1.begin(), d1.end());
    double frac = static_cast<double>(within) / static_cast<double>(results.size());
    bool pass = frac >= quantile;
    ok = ok && pass;
    log << "compare n=" << job.sim.n << ": D2 <= " << d2_max << " in " << within << "/" << results.size()
        << " replicas" << (pass ? " ok" : " FAIL") << "\n";
    return {{"n", job.sim.n},
            {"D2_max", d2_max},
            {"fraction_within", frac},
            {"median_D1", d1[d1.size() / 2]},
            {"pass", pass},
            {"replicas", reps}};
}

}  // namespace

int cmd_verify(const CliOptions& opt, std::ostream& log) {
    Json cfg = load_json(opt.config);
    Fields f(cfg, "");
    f.only({"suite", "oracle", "compare"});
    Json resolved = cfg;
    if (opt.seed) resolved["seed_override"] = *opt.seed;
    RunManifest m{"verify", digest_of(resolved), opt.seed.value_or(0), "", resolved, {}};
    prepare_out(opt.out);
    apply_jobs(opt);

    Json report;
    report["config_digest"] = m.config_digest;
    bool ok = true;
    if (cfg.empty()) {
        log << "warning: verify config lists no checks; nothing to do\n";
        report["warning"] = "empty configuration";
    }
    if (f.has("suite")) {
        SuiteOptions so = parse_suite(f.sub("suite"), opt);
        SuiteReport r = property_suite(so);
        report["suite"] = suite_json(so, r);
        ok = ok && r.pass();
        log << "suite: " << r.violations << " violation(s)\n";
    }
    if (f.has("oracle")) report["oracle"] = oracle_check(f.sub("oracle"), log, ok);
    if (f.has("compare")) report["compare"] = compare_check(f.sub("compare"), opt, log, ok);
    report["pass"] = ok;
    write_json(opt.out / "verify.json", report);
    m.outputs.push_back("verify.json");
    finish_manifest(m, opt.out);
    return ok ? exit_ok : exit_check_failed;
}

int cmd_props(const CliOptions& opt, std::ostream& log) {
    Json cfg = opt.config.empty() ? Json::object() : load_json(opt.config);
    SuiteOptions so = parse_suite(Fields(cfg, ""), opt);
    Json resolved = {{"seed", so.seed}, {"trials", so.trials}, {"inject_fault", so.inject_fault},
                     {"solver_checks", so.solver_checks}};
    RunManifest m{"props", digest_of(resolved), so.seed, "", resolved, {}};
    prepare_out(opt.out);
    apply_jobs(opt);
    SuiteReport r = property_suite(so);
    write_json(opt.out / "suite.json", suite_json(so, r));
    write_suite_csv(opt.out / "suite.csv", m.config_digest, r);
    m.outputs = {"suite.json", "suite.csv"};
    finish_manifest(m, opt.out);
    for (const auto& e : r.entries)
        log << e.name << ": " << e.violations << "/" << e.trials << " violations, worst " << e.worst << "\n";
    return r.pass() ? exit_ok : exit_check_failed;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Atlas model free-boundary solvers, particle simulation and checks", "atlasfbp"};
    app.set_version_flag("--version", artifact_version());
    app.require_subcommand(1);
    CliOptions opt;
    std::string config, outdir = ".";
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* s, bool config_required) {
        auto* c = s->add_option("--config", config, "JSON configuration");
        if (config_required) c->required();
        s->add_option("--out", outdir, "output directory");
        s->add_option("--seed", seed, "seed override");
        s->add_option("--jobs", opt.jobs, "worker count")->check(CLI::NonNegativeNumber);
    };
    CLI::App* solve = app.add_subcommand("solve", "run the splitting and mild solvers");
    CLI::App* simulate = app.add_subcommand("simulate", "simulate the particle system");
    CLI::App* verify = app.add_subcommand("verify", "oracle, comparison and property checks");
    CLI::App* props = app.add_subcommand("props", "ordering property suite");
    add_common(solve, true);
    add_common(simulate, true);
    add_common(verify, true);
    add_common(props, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_invalid;
    }
    opt.config = config;
    opt.out = outdir;
    for (CLI::App* s : {solve, simulate, verify, props})
        if (s->parsed() && s->count("--seed") > 0) opt.seed = seed;

    try {
        if (solve->parsed()) return cmd_solve(opt, out);
        if (simulate->parsed()) return cmd_simulate(opt, out);
        if (verify->parsed()) return cmd_verify(opt, out);
        return cmd_props(opt, out);
    } catch (const ConfigError& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return exit_invalid;
    } catch (const UsageError& e) {
        err << "invalid request: " << e.what() << "\n";
        return exit_invalid;
    } catch (const DomainError& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return exit_invalid;
    } catch (const nlohmann::json::exception& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return exit_invalid;
    } catch (const OverflowError& e) {
        err << "numerical abort: " << e.what() << "\n";
        return exit_numerical;
    } catch (const SolverError& e) {
        err << "numerical abort: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}

}  // namespace atlas
