#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kg/cli.hpp"

using namespace kg::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const char* tag) {
        path = fs::temp_directory_path() / (std::string("kg_test_") + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

} // namespace

TEST_CASE("mode parsing") {
    CHECK(parse_mode("td") == RunMode::Td);
    CHECK(parse_mode("sweep") == RunMode::Sweep);
    CHECK_THROWS_AS(parse_mode("nope"), std::invalid_argument);
}

TEST_CASE("config file merging and overrides") {
    TempDir dir("cfg");
    const fs::path cfg = dir.path / "run.cfg";
    write(cfg, "# comment\nalpha0 = 0.075\nn = 0.3\nr = 0.05\nnu = 0.005\n");
    std::vector<std::string> overrides = {"nu=0.125"};
    const RunSpec spec = parse_config(RunMode::Td, cfg.string(), overrides, dir.path.string());
    CHECK(spec.keys.at("alpha0") == "0.075");
    CHECK(spec.keys.at("nu") == "0.125"); // flag wins over the file
}

TEST_CASE("unknown keys are named") {
    TempDir dir("badkey");
    try {
        std::vector<std::string> ov = {"bogus=1"};
        (void)parse_config(RunMode::Td, "", ov, dir.path.string());
        FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
}

TEST_CASE("validation failures exit with 3 and name the field") {
    TempDir dir("val");
    // bgp with nu=0 but no theta
    std::vector<std::string> ov = {"nu=0", "alpha0=0.075", "n=0.3"};
    const RunSpec spec = parse_config(RunMode::Bgp, "", ov, (dir.path / "out").string());
    CHECK(execute(spec) == 3);
}

TEST_CASE("analytic mode emits the closed-form gamma") {
    TempDir dir("analytic");
    std::vector<std::string> ov = {"alpha0=0.075", "theta=0.3", "k=1", "n_cells=100"};
    const RunSpec spec =
        parse_config(RunMode::Analytic, "", ov, (dir.path / "out").string());
    CHECK(execute(spec) == 0);
    const std::string rep = slurp(dir.path / "out" / "report.json");
    CHECK(rep.find("\"gamma\": 0.0225") != std::string::npos);
    CHECK(fs::exists(dir.path / "out" / "cdf.csv"));
}

TEST_CASE("td mode writes profiles, series and report deterministically") {
    TempDir dir("td");
    std::vector<std::string> ov = {"alpha0=0.075", "n=0.3",  "r=0.05",        "nu=0.005",
                                   "tau=0.1",      "T=2",    "n_cells=100",   "x_max=20",
                                   "max_outer=40", "snapshot_stride=10"};
    const RunSpec spec = parse_config(RunMode::Td, "", ov, (dir.path / "a").string());
    CHECK(execute(spec) == 0);
    CHECK(fs::exists(dir.path / "a" / "series.csv"));
    CHECK(fs::exists(dir.path / "a" / "report.json"));
    CHECK(fs::exists(dir.path / "a" / "profiles_0.csv"));
    const std::string series = slurp(dir.path / "a" / "series.csv");
    CHECK(series.rfind("t,Y,mass\n", 0) == 0);

    // identical spec => byte-identical outputs
    const RunSpec spec2 = parse_config(RunMode::Td, "", ov, (dir.path / "b").string());
    CHECK(execute(spec2) == 0);
    CHECK(slurp(dir.path / "a" / "series.csv") == slurp(dir.path / "b" / "series.csv"));
    CHECK(slurp(dir.path / "a" / "profiles_2.csv") == slurp(dir.path / "b" / "profiles_2.csv"));
}

TEST_CASE("sweep mode aggregates cells in axis order") {
    TempDir dir("sweep");
    std::vector<std::string> ov = {"alpha0=0.005", "n=0.5", "r=0.1",
                                   "sweep_nu=0.02,0.08",    "n_cells=200",
                                   "x_max=20",    "fp_tol=1e-7"};
    const RunSpec spec = parse_config(RunMode::Sweep, "", ov, (dir.path / "out").string());
    CHECK(execute(spec) == 0);
    const std::string series = slurp(dir.path / "out" / "series.csv");
    CHECK(series.rfind("nu,gamma,x0,Y0\n", 0) == 0);
    const auto first = series.find("\n0.02");
    const auto second = series.find("\n0.08");
    CHECK(first != std::string::npos);
    CHECK(second != std::string::npos);
    CHECK(first < second);
    CHECK(fs::exists(dir.path / "out" / "cell_0" / "profiles.csv"));
    CHECK(fs::exists(dir.path / "out" / "cell_1" / "profiles.csv"));
}

TEST_CASE("ktransform mode reports gamma and the tail constraint") {
    TempDir dir("ktr");
    std::vector<std::string> ov = {"k_tilde=1", "theta=0.3", "alpha0=0.075", "n=0.3",
                                   "s_tilde=1", "xtilde_max=4000", "xtilde_cells=800000"};
    const RunSpec spec = parse_config(RunMode::Ktransform, "", ov, (dir.path / "out").string());
    CHECK(execute(spec) == 0);
    const std::string rep = slurp(dir.path / "out" / "report.json");
    CHECK(rep.find("\"gamma\"") != std::string::npos);
    CHECK(fs::exists(dir.path / "out" / "kprofile.csv"));
}

TEST_CASE("run_main argument handling") {
    TempDir dir("argv");
    std::vector<std::string> args = {"analytic", "--alpha0=0.1", "--theta=0.5", "--k=2",
                                     "--out", (dir.path / "out").string()};
    CHECK(run_main(args) == 0);
    std::vector<std::string> missing_out = {"analytic", "--alpha0=0.1"};
    CHECK(run_main(missing_out) == 3);
    std::vector<std::string> bad_mode = {"what", "--out", dir.path.string()};
    CHECK(run_main(bad_mode) == 3);
}
