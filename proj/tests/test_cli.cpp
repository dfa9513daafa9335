#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "atlasfbp/cli.hpp"
#include "atlasfbp/errors.hpp"
#include "atlasfbp/io.hpp"

using namespace atlas;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("atlasfbp_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) const {
        fs::path p = dir / name;
        std::ofstream(p) << text;
        return p;
    }
};

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "atlasfbp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text) *err_text = err.str();
    return code;
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> m;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) m[fs::relative(e.path(), root).string()] = read_file(e.path());
    return m;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("io helpers") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fmt_double(0.1) == "0.1");
    CHECK(fmt_double(1e-3) == "0.001");
    CHECK_THROWS_AS(parse_json_text("{\"a\": }", "x.json"), ConfigError);
    Json j = parse_json_text(R"({"a": {"b": "no"}})", "x.json");
    Fields f(j, "");
    try {
        f.sub("a").number("b");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("a.b") != std::string::npos);
    }
}

TEST_CASE("invalid input maps to exit code 2") {
    Scratch s("invalid");
    std::string err;
    CHECK(run({"solve", "--config", s.write("bad.json", "{\"T\": 0.1,,}").string(), "--out", s.dir.string()}, &err) ==
          exit_invalid);
    CHECK(err.find("malformed JSON") != std::string::npos);
    CHECK(run({"solve", "--config", s.write("key.json", R"({"initial":{"model":"linear","lambda":2},"hh":1})").string(),
               "--out", s.dir.string()},
              &err) == exit_invalid);
    CHECK(err.find("hh") != std::string::npos);
    CHECK(run({"solve"}) == exit_invalid);
    CHECK(run({"frobnicate"}) == exit_invalid);
    CHECK(run({"solve", "--config", (s.dir / "missing.json").string()}) == exit_invalid);
    CHECK(run({"simulate", "--config",
               s.write("neg.json", R"({"initial":{"model":"linear","lambda":-1},"n":10,"T":0.01})").string(), "--out",
               s.dir.string()}) == exit_invalid);
}

TEST_CASE("props exit codes") {
    Scratch s("props");
    CHECK(run({"props", "--config", s.write("ok.json", R"({"trials":10,"solver_checks":false})").string(),
               "--out", (s.dir / "ok").string()}) == exit_ok);
    CHECK(fs::exists(s.dir / "ok" / "suite.json"));
    CHECK(fs::exists(s.dir / "ok" / "manifest.json"));
    CHECK(run({"props", "--config",
               s.write("mut.json", R"({"trials":50,"inject_fault":"cut_off_by_one","solver_checks":false})")
                   .string(),
               "--out", (s.dir / "mut").string()}) == exit_check_failed);
}

TEST_CASE("verify with an empty configuration") {
    Scratch s("verify");
    CHECK(run({"verify", "--config", s.write("e.json", "{}").string(), "--out", s.dir.string()}) == exit_ok);
}

TEST_CASE("solve writes its artifacts") {
    Scratch s("solve");
    auto cfg = s.write("s.json", R"({"initial":{"model":"linear","lambda":1},"T":0.01,"h":2e-3,"delta":1e-3,
                                     "mild_steps":20})");
    REQUIRE(run({"solve", "--config", cfg.string(), "--out", (s.dir / "o").string()}) == exit_ok);
    for (const char* f : {"splitting_sigma.csv", "mild_sigma.csv", "summary.json", "manifest.json"})
        CHECK(fs::exists(s.dir / "o" / f));
    Json summary = load_json(s.dir / "o" / "summary.json");
    CHECK(summary.contains("selfsimilar_sigma_T"));
    std::string csv = read_file(s.dir / "o" / "mild_sigma.csv");
    CHECK(csv.rfind("# config_digest=", 0) == 0);
}

TEST_CASE("simulate reruns are byte-identical") {
    Scratch s("simulate");
    auto cfg = s.write("sim.json", R"({"initial":{"model":"linear","lambda":2},"n":100,"T":0.01,
                                      "replicas":2,"checkpoint_times":[0.005,0.01]})");
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (s.dir / "a").string(), "--seed", "5"}) == exit_ok);
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (s.dir / "b").string(), "--seed", "5", "--jobs", "2"}) ==
            exit_ok);
    auto a = tree(s.dir / "a"), b = tree(s.dir / "b");
    CHECK(a.size() >= 6);
    CHECK(a == b);
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (s.dir / "c").string(), "--seed", "6"}) == exit_ok);
    CHECK(tree(s.dir / "c") != a);
}

}  // TEST_SUITE
