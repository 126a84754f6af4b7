#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string cli = PISTON_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("steady-state sweep writes the detuning scan") {
    TempDir dir("piston_cli_sweep");
    CHECK(run("steady-state --preset fig2b --out " + dir.path.string()) == 0);
    const auto csv = slurp(dir.path / "steady_state.csv");
    CHECK(csv.find("kappa_H_over_kappa_C") != std::string::npos);
    CHECK(csv.find("\n10,") != std::string::npos); // kappa_H = 10 block
}

TEST_CASE("pv run writes curves and summary") {
    TempDir dir("piston_cli_pv");
    CHECK(run("pv --preset fig2d --out " + dir.path.string()) == 0);
    CHECK(fs::exists(dir.path / "pv.csv"));
    const auto summary = slurp(dir.path / "pv_summary.csv");
    CHECK(summary.find("loop_area") != std::string::npos);
}

TEST_CASE("params derives circuit quantities") {
    TempDir dir("piston_cli_params");
    const fs::path cfg = dir.path / "circuit.json";
    {
        std::ofstream out(cfg);
        out << R"({"variant": "capacitive", "C_tilde": 4e-13,
                   "CJ_tilde": 1e-13, "C_c": 2e-14, "L": 2e-9,
                   "E_J": 2e-22})";
    }
    CHECK(run("params --config " + cfg.string() + " --out " +
              dir.path.string()) == 0);
    const auto report = slurp(dir.path / "params.json");
    CHECK(report.find("omega0") != std::string::npos);
    CHECK(report.find("regime") != std::string::npos);
}

TEST_CASE("simulate then analyze round trip") {
    TempDir dir("piston_cli_sim");
    CHECK(run("simulate --preset fig3 --n-traj 4 --t-end 50 --out " +
              dir.path.string()) == 0);
    CHECK(fs::exists(dir.path / "traj_0000.csv"));
    CHECK(fs::exists(dir.path / "traj_0003.csv"));
    CHECK(fs::exists(dir.path / "stats.csv"));
    const auto manifest = slurp(dir.path / "manifest.json");
    CHECK(manifest.find("\"completed\": 4") != std::string::npos);
    CHECK(manifest.find("clamp_count_total") != std::string::npos);

    // Too short a record for a validity window: must report, not pass.
    CHECK(run("analyze --preset fig3 --stats " +
              (dir.path / "stats.csv").string() + " --out " +
              dir.path.string()) == 0);
    const auto report = slurp(dir.path / "analyze.json");
    CHECK(report.find("\"pass\": false") != std::string::npos);
    CHECK(report.find("\"window_empty\": true") != std::string::npos);
}

TEST_CASE("identical runs give identical bytes") {
    TempDir a("piston_cli_repro_a"), b("piston_cli_repro_b");
    const std::string base = "simulate --preset fig3 --n-traj 3 --t-end 20";
    CHECK(run(base + " --out " + a.path.string()) == 0);
    CHECK(run(base + " --threads 3 --out " + b.path.string()) == 0);
    for (const char* name : {"traj_0000.csv", "traj_0002.csv", "stats.csv"}) {
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
}

TEST_CASE("bad configuration exits with code 2") {
    TempDir dir("piston_cli_bad");
    const fs::path cfg = dir.path / "bad.json";
    {
        std::ofstream out(cfg);
        out << R"({"preset": "fig3", "banana": 1})";
    }
    CHECK(run("simulate --config " + cfg.string() + " --out " +
              dir.path.string()) == 2);
    CHECK(run("simulate --preset fig99 --out " + dir.path.string()) == 2);
}

TEST_CASE("missing stats file is a runtime error, exit code 1") {
    TempDir dir("piston_cli_nostats");
    CHECK(run("analyze --preset fig3 --stats " +
              (dir.path / "nope.csv").string() + " --out " +
              dir.path.string()) == 1);
}
