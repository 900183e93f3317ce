#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "nlac/snapshot.hpp"
#include "support.hpp"

using namespace nlac;
using namespace nlac::cli;
using namespace nlac::test;
namespace fs = std::filesystem;

namespace {

fs::path config_dir() {
    const char* env = std::getenv("NLAC_CONFIG_DIR");
    REQUIRE(env != nullptr);
    return env;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::current_path() / "cli_runs" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    std::vector<std::string> argv{"nlac"};
    argv.insert(argv.end(), args.begin(), args.end());
    const int code = run_command(argv);
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str(), err.str()};
}

const char* kSmallKzk = R"([model]
kind = kzk
nu = 0.01

[grid]
n_along = 16
n_transverse = 8

[march]
end = 0.02
step = 0.005
cadence = 2
)";

}  // namespace

TEST_CASE("minimal config takes the defaults") {
    const SimulationConfig c = parse_config("[model]\nkind = kzk\n");
    CHECK(c.model == ModelKind::kzk);
    CHECK(c.preset == "nondim");
    CHECK(c.params.rho0 == 1.0);
    CHECK(c.params.c == 1.0);
    CHECK(c.params.gamma == 1.4);
    CHECK(c.params.eps == 0.1);
    CHECK(c.grid.n_along == 32);
    CHECK(c.initial.profile == "gaussian-beam");
    CHECK(c.experiment.params.c == c.params.c);
}

TEST_CASE("unknown key is a parse error naming the key") {
    CHECK(kind_of([] { parse_config("[model]\ngamm = 1.4\n"); }) == ErrorKind::Parse);
    CHECK(detail_of([] { parse_config("[model]\ngamm = 1.4\n"); }).find("gamm") != std::string::npos);
    CHECK(kind_of([] { parse_config("[modle]\nkind = kzk\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_config("[model]\nkind = burgers\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_config("[grid]\nn_along = 3x\n"); }) == ErrorKind::Parse);
}

TEST_CASE("invalid values are validation errors naming the field") {
    CHECK(kind_of([] { parse_config("[experiment]\neps = 0.1, 0.2\n"); }) == ErrorKind::Validation);
    CHECK(detail_of([] { parse_config("[experiment]\neps = 0.1, 0.2\n"); }) == "eps list not decreasing");
    CHECK(detail_of([] { parse_config("[grid]\nn_along = 48\n"); }) == "n_along");
    CHECK(kind_of([] { parse_config("[model]\nc = -1\n"); }) == ErrorKind::Validation);
    CHECK(kind_of([] { parse_config("[model]\npreset = air\n"); }) == ErrorKind::Validation);
}

TEST_CASE("file values override the preset, which overrides defaults") {
    const SimulationConfig water = parse_config("[model]\npreset = water\n");
    CHECK(water.params.rho0 == 1000.0);
    CHECK(water.params.c == 1500.0);
    CHECK(water.experiment.cone_M == doctest::Approx(1.1 * 1500.0));
    const SimulationConfig mixed = parse_config("[model]\npreset = water\nc = 2\n");
    CHECK(mixed.params.rho0 == 1000.0);
    CHECK(mixed.params.c == 2.0);
    // The command-line preset replaces the file's preset but not explicit keys.
    const SimulationConfig over = parse_config("[model]\npreset = water\nc = 2\n", "nondim");
    CHECK(over.preset == "nondim");
    CHECK(over.params.rho0 == 1.0);
    CHECK(over.params.c == 2.0);
}

TEST_CASE("digest ignores the output directory and tracks every other key") {
    const SimulationConfig a = parse_config("[model]\nkind = kzk\n[output]\ndir = one\n");
    const SimulationConfig b = parse_config("[model]\nkind = kzk\n[output]\ndir = two\n");
    const SimulationConfig c = parse_config("[model]\nkind = kzk\nnu = 0.01\n");
    CHECK(config_digest(a) == config_digest(b));
    CHECK(config_digest(a) != config_digest(c));
    CHECK(config_digest(a).size() == 64);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run({"no-such-command"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"solve-kzk"}).code == 1);
    const Outcome missing = run({"solve-kzk", "--config", "does/not/exist.ini"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("cannot read config") != std::string::npos);
    CHECK(run({"solve-kzk", "--config", (config_dir() / "kzk_beam.ini").string(), "--preset", "air"}).code == 1);
}

TEST_CASE("inviscid shock exits 2 and reports the last good z") {
    const fs::path dir = scratch("shock");
    const Outcome o = run({"solve-kzk", "--config", (config_dir() / "shock.ini").string(), "--out", dir.string()});
    CHECK(o.code == 2);
    CHECK(o.err.find("numerical failure") != std::string::npos);
    CHECK(o.err.find("last good z=") != std::string::npos);
    REQUIRE(fs::exists(dir / "last_good.ac1"));
    CHECK(fs::exists(dir / "run.json"));
    const Field last = load_snapshot((dir / "last_good.ac1").string());
    CHECK(last.grid().dims() == std::vector<std::size_t>{32});
    CHECK(max_abs(last) > 0.0);
}

TEST_CASE("solve-kzk writes a manifest and snapshots") {
    const fs::path dir = scratch("kzk");
    const fs::path cfg = write_file(dir.parent_path() / "kzk_small.ini", kSmallKzk);
    const Outcome o = run({"solve-kzk", "--config", cfg.string(), "--out", dir.string()});
    REQUIRE(o.code == 0);
    const std::string manifest = slurp(dir / "manifest.csv");
    CHECK(manifest.rfind("z,path,l2,mean_tau_residual\n", 0) == 0);
    CHECK(fs::exists(dir / "I_00000.ac1"));
    CHECK(fs::exists(dir / "I_00002.ac1"));
    CHECK(slurp(dir / "run.json").find("config_digest") != std::string::npos);
}

TEST_CASE("a directory holding a different digest is not overwritten") {
    const fs::path dir = scratch("digest");
    const fs::path a = write_file(dir.parent_path() / "digest_a.ini", kSmallKzk);
    const fs::path b = write_file(dir.parent_path() / "digest_b.ini", std::string(kSmallKzk) + "\n[initial]\namplitude = 0.02\n");
    REQUIRE(run({"solve-kzk", "--config", a.string(), "--out", dir.string()}).code == 0);
    const std::string before = slurp(dir / "run.json");
    // Same config again is allowed.
    CHECK(run({"solve-kzk", "--config", a.string(), "--out", dir.string()}).code == 0);
    const Outcome refused = run({"solve-kzk", "--config", b.string(), "--out", dir.string()});
    CHECK(refused.code == 1);
    CHECK(refused.err.find("refusing to overwrite") != std::string::npos);
    CHECK(slurp(dir / "run.json") == before);
}

TEST_CASE("identical configs give byte-identical outputs") {
    const fs::path d1 = scratch("det1"), d2 = scratch("det2");
    const fs::path cfg = write_file(d1.parent_path() / "det.ini", kSmallKzk);
    REQUIRE(run({"solve-kzk", "--config", cfg.string(), "--out", d1.string()}).code == 0);
    REQUIRE(run({"solve-kzk", "--config", cfg.string(), "--out", d2.string()}).code == 0);
    CHECK(slurp(d1 / "manifest.csv") == slurp(d2 / "manifest.csv"));
    CHECK(slurp(d1 / "I_00002.ac1") == slurp(d2 / "I_00002.ac1"));
    CHECK(slurp(d1 / "run.json") != "");
}

TEST_CASE("convergence subcommand reports the observed order") {
    const fs::path dir = scratch("conv");
    const fs::path cfg = write_file(dir.parent_path() / "conv.ini",
                                    "[convergence]\nsolver = npe\nproblem = gaussian-beam\nresolutions = 20, 40, 80\n");
    const Outcome o = run({"convergence", "--config", cfg.string(), "--out", dir.string()});
    REQUIRE(o.code == 0);
    CHECK(o.out.rfind("npe/gaussian-beam order ", 0) == 0);
    CHECK(slurp(dir / "convergence.csv").rfind("resolution,difference,order,status\n", 0) == 0);
}

TEST_CASE("shipped configs all parse") {
    for (const auto& entry : fs::directory_iterator(config_dir())) {
        if (entry.path().extension() != ".ini") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_config(entry.path().string()));
    }
}
