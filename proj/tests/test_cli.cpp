#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args)
{
    const std::string cmd = std::string(ENP_SIM_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("enp_sim_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& text)
{
    std::ofstream(path) << text;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("presets subcommand succeeds")
{
    CHECK(run("presets") == 0);
}

TEST_CASE("run writes deterministic outputs")
{
    const fs::path dir = scratch("run");
    write(dir / "cfg", "preset = paper-road\nrun.epochs = 30\nrun.warmup_epochs = 2\n");
    const std::string cfg = (dir / "cfg").string();
    REQUIRE(run("run --config " + cfg + " --seed 9 --events --out " + (dir / "a").string()) == 0);
    REQUIRE(run("run --config " + cfg + " --seed 9 --events --out " + (dir / "b").string()) == 0);
    for (const char* f : {"iterations.csv", "summary.csv", "summary_by_pair.csv", "events.tsv"}) {
        CAPTURE(f);
        CHECK(fs::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    REQUIRE(run("run --config " + cfg + " --seed 10 --out " + (dir / "c").string()) == 0);
    CHECK(slurp(dir / "a" / "iterations.csv") != slurp(dir / "c" / "iterations.csv"));
    CHECK_FALSE(fs::exists(dir / "c" / "events.tsv"));
}

TEST_CASE("sweep writes one row per cell")
{
    const fs::path dir = scratch("sweep");
    write(dir / "cfg", "run.epochs = 5\nrun.warmup_epochs = 0\n");
    REQUIRE(run("sweep --config " + (dir / "cfg").string() + " --vn 10,20 --vs 30-60,60-90 --out " +
                (dir / "out").string()) == 0);
    const std::string summary = slurp(dir / "out" / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 5);
    CHECK(summary.rfind("v_n,v_s_min,v_s_max,s_slots,iterations,mean_acc_union,std_acc_union,mean_acc_single\n", 0) ==
          0);
}

TEST_CASE("exit status 2 for configuration errors")
{
    const fs::path dir = scratch("errors");
    write(dir / "bad", "fleet.v_min_kmh = 0\n");
    CHECK(run("run --config " + (dir / "bad").string()) == 2);
    CHECK(run("run --config " + (dir / "missing").string()) == 2);
    CHECK(run("run") == 2);
    CHECK(run("bogus") == 2);
    write(dir / "ok", "run.epochs = 1\n");
    CHECK(run("sweep --config " + (dir / "ok").string() + " --vn 10 --vs 90-30") == 2);
}

TEST_CASE("exit status 1 for runtime I/O failures")
{
    const fs::path dir = scratch("io");
    write(dir / "ok", "preset = oracle-collision-free\nrun.epochs = 1\n");
    write(dir / "blocker", "not a directory");
    CHECK(run("run --config " + (dir / "ok").string() + " --out " + (dir / "blocker" / "sub").string()) == 1);
}
