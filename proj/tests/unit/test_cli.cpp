#include "doctest.h"

#include "oscbound/grid_io.hpp"

#include "json.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using namespace oscbound;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(OSCBOUND_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

struct TempDir {
    fs::path path = fs::temp_directory_path() / "oscbound_cli_test";
    TempDir() {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("usage errors exit 2") {
        CHECK(run("") == 2);
        CHECK(run("frobnicate") == 2);
        CHECK(run("verify --suite nope --trials 1") == 2);
        CHECK(run("verify --suite klemes1d --dim 2 --trials 1") == 2);
        CHECK(run("verify --suite wik --dim 2 --grid 8x8x8 --trials 1") == 2);
        CHECK(run("czd --input /nonexistent.oscg --t 0.5") == 2);
    }

    TEST_CASE("verify writes a report") {
        TempDir dir;
        CHECK(run("verify --suite bds --dim 2 --grid 8 --trials 3 --seed 5 --out " + dir / "r.json" + " --csv " +
                  dir / "r.csv" + " --plot-data " + dir / "p.csv") == 0);
        const auto j = read_json(dir / "r.json");
        CHECK(j["suite"] == "bds");
        CHECK(j["verdict"] == "pass");
        CHECK(j["trials"].size() == 3);
        CHECK(j["constant"].get<double>() == 4.0);
        CHECK(fs::exists(dir / "r.csv"));
        CHECK(fs::exists(dir / "p.csv"));

        CHECK(run("verify --suite bds --dim 2 --grid 8 --trials 3 --seed 5 --out " + dir / "s.json") == 0);
        auto a = j;
        auto b = read_json(dir / "s.json");
        a.erase("wall_time_s");
        b.erase("wall_time_s");
        CHECK(a == b);
    }

    TEST_CASE("violation exits 1 and leaves reproducers") {
        TempDir dir;
        CHECK(run("verify --suite klemes1d --dim 1 --grid 32 --trials 2 --weights 0,0,0,0,1,0 --slack -0.99999 "
                  "--out " + dir / "r.json") == 1);
        CHECK(fs::exists(dir.path / "reproducers"));
        CHECK_FALSE(read_json(dir / "r.json")["reproducers"].empty());
    }

    TEST_CASE("grid tools") {
        TempDir dir;
        CHECK(run("corpus --family twolevel --dim 1 --grid 16 --count 2 --seed 3 --out-dir " + dir.path.string()) ==
              0);
        const std::string f0 = dir / "f0.oscg";
        REQUIRE(fs::exists(f0));
        CHECK(load_grid(f0).size() == 16);

        CHECK(run("oscillation --input " + f0 + " --basis cubes --refine --out " + dir / "o.json") == 0);
        CHECK(read_json(dir / "o.json").contains("value"));
        CHECK(run("oscillation --input " + f0 + " --basis hexagons") == 2);

        CHECK(run("rearrange --input " + f0 + " --csv " + dir / "s.csv" + " --json " + dir / "s.json") == 0);
        CHECK(fs::exists(dir / "s.csv"));

        for (const char* method : {"dyadic", "bisection", "risingsun"}) {
            CAPTURE(method);
            CHECK(run(std::string("czd --input ") + f0 + " --t 0.25 --method " + method + " --out " +
                      dir / "c.json") == 0);
            CHECK(read_json(dir / "c.json")["validation"]["ok"] == true);
        }
        CHECK(run("czd --input " + f0) == 2);
        CHECK(run("czd --input " + f0 + " --t 0.5 --level 1") == 2);
    }

    TEST_CASE("constants and concentration") {
        TempDir dir;
        CHECK(run("constants --dim 2 --out " + dir / "c.json") == 0);
        const auto c = read_json(dir / "c.json");
        REQUIRE(c.size() == 1);
        CHECK(c[0]["theorem_bound"].get<double>() == doctest::Approx(6.0));
        CHECK(run("concentration --random m=6 --trials 3 --seed 2 --out " + dir / "k.json") == 0);
        CHECK(read_json(dir / "k.json")["instances"].size() == 3);
        CHECK(run("concentration --random m=30") == 2);
    }
}
