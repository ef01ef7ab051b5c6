#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "core/config.hpp"
#include "core/experiment.hpp"
#include "core/fields.hpp"
#include "doctest.h"

using namespace plap;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
[params]
p = 1.8
mu = 0.5
dim = 1
n = 31
dt = 1e-3
t_end = 0.01

[initial]
kind = sine
amplitudes = 1.0

[experiment]
kind = run
)";

std::string throws_with(const std::string& text) {
    try {
        parse_config(text);
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("plap_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int counter;
};
int TempDir::counter = 0;

}  // namespace

TEST_CASE("minimal config parses and validates") {
    ExperimentConfig cfg = parse_config(kMinimal);
    CHECK(cfg.params.p == 1.8);
    CHECK(cfg.params.mu == 0.5);
    CHECK(cfg.params.n_cells == 31);
    CHECK(cfg.kind == ExperimentKind::run);
    CHECK(cfg.initial.kind == InitialCondition::Kind::sine);
    CHECK(cfg.effective_ncomp() == 1);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("out-of-range exponent is rejected with the admissible interval") {
    std::string bad(kMinimal);
    bad.replace(bad.find("p = 1.8"), 7, "p = 2.5");
    CHECK_THROWS_WITH(parse_config(bad), doctest::Contains("(3/2, 2]"));
}

TEST_CASE("duplicate keys report both line numbers") {
    std::string text = "[params]\np = 1.8\np = 1.9\n";
    std::string msg = throws_with(text);
    CHECK(msg.find("duplicate key 'p'") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("unknown keys, sections, and malformed lines are rejected") {
    CHECK(throws_with("[params]\nbogus = 1\n").find("bogus") != std::string::npos);
    CHECK(throws_with("[nosuch]\n").find("unknown section") != std::string::npos);
    CHECK(throws_with("[params]\np 1.8\n").find("key = value") != std::string::npos);
    CHECK(throws_with("p = 1.8\n").find("before any section") != std::string::npos);
    CHECK(throws_with("[params]\ndt = abc\n").find("number") != std::string::npos);
}

TEST_CASE("the experiment kind is mandatory") {
    std::string text(kMinimal);
    text.resize(text.find("[experiment]"));
    std::string msg = throws_with(text);
    CHECK(msg.find("experiment kind required") != std::string::npos);
}

TEST_CASE("config echo round-trips through the parser") {
    ExperimentConfig cfg = parse_config(kMinimal);
    cfg.params.nu = 0.125;
    cfg.seed = 77;
    ExperimentConfig again = parse_config(cfg.echo());
    CHECK(again.params.p == cfg.params.p);
    CHECK(again.params.nu == 0.125);
    CHECK(again.seed == 77);
    CHECK(again.kind == cfg.kind);
    CHECK(again.echo() == cfg.echo());
}

TEST_CASE("parse_config_file reads from disk and reports missing files") {
    TempDir tmp;
    fs::path p = tmp.path / "cfg.ini";
    std::ofstream(p) << kMinimal;
    ExperimentConfig cfg = parse_config_file(p.string());
    CHECK(cfg.params.p == 1.8);
    CHECK_THROWS(parse_config_file((tmp.path / "missing.ini").string()));
}

TEST_CASE("snapshot files round-trip bit-exactly") {
    TempDir tmp;
    Grid g(2, 9);
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::sine;
    ic.amplitudes = {0.37};
    VectorField v = make_initial(ic, g, 2);
    fs::path p = tmp.path / "snap.bin";
    write_snapshot(p.string(), v);
    VectorField back = read_snapshot(p.string());
    REQUIRE(back.ncomp() == 2);
    CHECK(lp_norm(back - v, kInfNorm) == 0.0);
    CHECK_THROWS(read_snapshot((tmp.path / "missing.bin").string()));
}

TEST_CASE("run experiment writes the full artifact set") {
    TempDir tmp;
    ExperimentConfig cfg = parse_config(kMinimal);
    cfg.output_dir = (tmp.path / "out").string();
    ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.all_ok());
    REQUIRE(res.jobs.size() == 1);
    fs::path dir = res.jobs[0].directory;
    CHECK(fs::exists(dir / "initial.bin"));
    CHECK(fs::exists(dir / "final.bin"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "config.echo"));
    CHECK(fs::exists(res.summary_path));

    std::ifstream csv(dir / "series.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "time,l2,linf,grad_l2,grad_lp,weighted_flux,energy_residual,overshoot,"
          "B_mu,phi_weight");
    int rows = 0;
    for (std::string line; std::getline(csv, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 11);  // t=0 plus 10 steps

    VectorField u0 = read_snapshot((dir / "initial.bin").string());
    CHECK(lp_norm(u0, kInfNorm) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("t_end = 0 still produces the initial row and snapshot") {
    TempDir tmp;
    ExperimentConfig cfg = parse_config(kMinimal);
    cfg.params.t_end = 0.0;
    cfg.output_dir = (tmp.path / "out").string();
    ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.all_ok());
    std::ifstream csv(fs::path(res.jobs[0].directory) / "series.csv");
    std::string line;
    int rows = -1;  // skip header
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 1);
}
