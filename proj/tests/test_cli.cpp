#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string cli = QARLAB_CLI_PATH;

int run(const std::string& args) {
    const int rc = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("qarlab_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_CASE("usage errors") {
    CHECK(run("") != 0);    // a subcommand is required
    CHECK(run("fit") != 0); // no data / seed
}

TEST_CASE("fit requires a seed") {
    const fs::path dir = fresh_dir("seed");
    write(dir / "d.csv", "y\n0.1\n0.5\n0.3\n0.8\n0.2\n");
    CHECK(run("fit --data " + (dir / "d.csv").string() + " --out " +
              (dir / "out").string()) == 4);
}

TEST_CASE("parse errors carry exit code 3") {
    const fs::path dir = fresh_dir("parse");
    write(dir / "d.csv", "y\n0.1\n\n0.5\nnot_a_number\n");
    CHECK(run("fit --seed 1 --data " + (dir / "d.csv").string() + " --out " +
              (dir / "out").string()) == 3);

    // a missing cell is a hard error
    write(dir / "m.csv", "a,b\n0.1,0.2\n0.3,\n");
    CHECK(run("fit --seed 1 --data " + (dir / "m.csv").string() + " --out " +
              (dir / "out").string()) == 3);
}

TEST_CASE("kx2006 rejects negative data") {
    const fs::path dir = fresh_dir("kx");
    write(dir / "d.csv", "y\n1.0\n2.0\n-0.5\n1.4\n");
    CHECK(run("fit --family kx2006 --seed 1 --data " +
              (dir / "d.csv").string() + " --out " + (dir / "out").string()) ==
          4);
}

TEST_CASE("simulate/fit/assess round trip on every scenario") {
    for (const std::string name :
         {"SC1", "SC2", "SC3", "SC4", "SC5", "SC6", "SC7"}) {
        const fs::path dir = fresh_dir("rt_" + name);
        const std::string data = (dir / "data.csv").string();
        const std::string out = (dir / "fit").string();
        const int K = name <= "SC4" ? 1 : 2;

        CHECK(run("simulate --scenario " + name + " --T 150 --seed 7 --out " +
                  dir.string() + " --out-csv " + data) == 0);
        CHECK(run("fit --data " + data + " --out " + out +
                  " --seed 8 --K " + std::to_string(K) +
                  " --iterations 1200 --burn-in 400 --thin 4") == 0);
        CHECK(run("assess --fit " + out + " --out " + out) == 0);
        CHECK(fs::exists(fs::path(out) / "metrics.json"));
    }
}

TEST_CASE("outputs are deterministic given config and seed") {
    const fs::path dir = fresh_dir("det");
    const std::string data = (dir / "data.csv").string();
    CHECK(run("simulate --scenario SC3 --T 80 --seed 3 --out " + dir.string() +
              " --out-csv " + data) == 0);

    const std::string a = (dir / "a").string(), b = (dir / "b").string();
    const std::string fit_args = " --data " + data +
                                 " --seed 5 --iterations 900 --burn-in 300 "
                                 "--thin 3";
    CHECK(run("fit --out " + a + fit_args) == 0);
    CHECK(run("fit --out " + b + fit_args) == 0);
    CHECK(slurp(fs::path(a) / "draws.csv") == slurp(fs::path(b) / "draws.csv"));
    CHECK(slurp(fs::path(a) / "theta_grid.csv") ==
          slurp(fs::path(b) / "theta_grid.csv"));
}

TEST_CASE("spatial pipeline with kriging at the observed sites") {
    const fs::path dir = fresh_dir("sqar");
    write(dir / "stations.csv",
          "id,x,y\nA,0,0\nB,1.2,0\nC,0.4,1.1\nD,1.6,1.3\n");
    const std::string data = (dir / "data.csv").string();
    const std::string out = (dir / "fit").string();

    std::string cfg = R"({
      "stations": ")" + (dir / "stations.csv").string() + R"(",
      "simulate": {"family": "sqar", "T": 60, "gamma": 0.8,
        "fields": {"loga1": 0.2, "logb1": 0.1, "loga2": -0.1, "logb2": 0.3},
        "out": ")" + data + R"("}
    })";
    write(dir / "sim.json", cfg);
    CHECK(run("simulate --config " + (dir / "sim.json").string() +
              " --seed 21 --out " + dir.string()) == 0);

    CHECK(run("fit --family sqar --stations " +
              (dir / "stations.csv").string() + " --data " + data + " --out " +
              out +
              " --seed 22 --iterations 800 --burn-in 300 --thin 5") == 0);
    CHECK(fs::exists(fs::path(out) / "summary.json"));

    CHECK(run("krige --fit " + out + " --sites " +
              (dir / "stations.csv").string() + " --out " + out +
              " --cond-y 0.5 --tau 0.5") == 0);
    CHECK(fs::exists(fs::path(out) / "surface.csv"));

    CHECK(run("assess --fit " + out + " --out " + out) == 0);
}
