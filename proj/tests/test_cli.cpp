#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

struct CliFixture {
  fs::path dir;
  CliFixture() {
    dir = fs::temp_directory_path() /
          ("warpqi_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~CliFixture() { fs::remove_all(dir); }

  std::string path(const std::string& name) const {
    return (dir / name).string();
  }

  // Returns the process exit code; stdout/stderr go to files in the fixture.
  int run(const std::string& args) const {
    const std::string cmd = std::string(WARPQI_CLI_PATH) + " " + args +
                            " >" + path("stdout.txt") + " 2>" +
                            path("stderr.txt");
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
  }
};

}  // namespace

TEST_CASE("cli end-to-end on a small square dataset") {
  CliFixture fx;

  SUBCASE("synth validates flags") {
    CHECK(fx.run("synth square --n 2 -o " + fx.path("sq.csv")) == 2);
    CHECK(fx.run("synth square --n 200 --seed 3 -o " + fx.path("sq.csv")) == 0);
    CHECK(fs::exists(fx.path("sq.csv")));
    CHECK(fs::exists(fx.path("sq.csv.manifest.json")));
  }

  SUBCASE("unknown method is a usage error") {
    CHECK(fx.run("project umap -i x.csv -o y.csv") == 2);
  }

  SUBCASE("missing input file names the path") {
    const int code = fx.run("project pca -i " + fx.path("absent.csv") + " -o " +
                            fx.path("out.csv"));
    CHECK(code == 1);
    CHECK(fx.slurp("stderr.txt").find("absent.csv") != std::string::npos);
  }

  SUBCASE("identity metrics") {
    REQUIRE(fx.run("synth square --n 150 --noise 0 --seed 5 -o " +
                   fx.path("sq.csv")) == 0);
    REQUIRE(fx.run("project pca -i " + fx.path("sq.csv") + " -o " +
                   fx.path("lay.csv")) == 0);
    // 2D layout measured against itself: use the layout as the data too.
    REQUIRE(fx.run("metrics -i " + fx.path("lay.csv") + " -l " +
                   fx.path("lay.csv") + " -o " + fx.path("rep.json")) == 0);
    const auto rep = nlohmann::json::parse(fx.slurp("rep.json"));
    CHECK(rep["trustworthiness"].get<double>() == 1.0);
    CHECK(rep["warping_index"].get<double>() <= 1e-12);
    CHECK(rep["stress"].get<double>() <= 1e-12);
    CHECK(rep["n_points"].get<int>() == 150);
  }

  SUBCASE("metrics --table prints the human-readable row") {
    REQUIRE(fx.run("synth square --n 120 --seed 9 -o " + fx.path("sq.csv")) ==
            0);
    REQUIRE(fx.run("project pca -i " + fx.path("sq.csv") + " -o " +
                   fx.path("lay.csv")) == 0);
    REQUIRE(fx.run("metrics -i " + fx.path("sq.csv") + " -l " +
                   fx.path("lay.csv") + " --table") == 0);
    const std::string out = fx.slurp("stdout.txt");
    CHECK(out.find("Stress") != std::string::npos);
    CHECK(out.find("Trust.") != std::string::npos);
    CHECK(out.find("Warping Index") != std::string::npos);
  }

  SUBCASE("metrics rejects mismatched point counts") {
    REQUIRE(fx.run("synth square --n 100 --seed 1 -o " + fx.path("a.csv")) == 0);
    REQUIRE(fx.run("synth square --n 120 --seed 1 -o " + fx.path("b.csv")) == 0);
    REQUIRE(fx.run("project pca -i " + fx.path("b.csv") + " -o " +
                   fx.path("blay.csv")) == 0);
    const int code = fx.run("metrics -i " + fx.path("a.csv") + " -l " +
                            fx.path("blay.csv"));
    CHECK(code == 1);
    const std::string err = fx.slurp("stderr.txt");
    CHECK(err.find("100") != std::string::npos);
    CHECK(err.find("120") != std::string::npos);
  }

  SUBCASE("render produces well-formed SVG deterministically") {
    REQUIRE(fx.run("synth square --n 120 --seed 2 -o " + fx.path("sq.csv")) ==
            0);
    REQUIRE(fx.run("project pca -i " + fx.path("sq.csv") + " -o " +
                   fx.path("lay.csv")) == 0);
    REQUIRE(fx.run("render -i " + fx.path("sq.csv") + " -l " +
                   fx.path("lay.csv") + " -o " + fx.path("a.svg")) == 0);
    REQUIRE(fx.run("render -i " + fx.path("sq.csv") + " -l " +
                   fx.path("lay.csv") + " -o " + fx.path("b.svg")) == 0);
    const std::string a = fx.slurp("a.svg");
    CHECK(!a.empty());
    CHECK(a == fx.slurp("b.svg"));
    CHECK(a.find("<svg") != std::string::npos);
  }

  SUBCASE("project tsne honors seed determinism and flag validation") {
    REQUIRE(fx.run("synth square --n 80 --seed 4 -o " + fx.path("sq.csv")) == 0);
    const std::string tsne_args = "project tsne -i " + fx.path("sq.csv") +
                                  " --perplexity 8 --iterations 60 --seed 6 -o ";
    REQUIRE(fx.run(tsne_args + fx.path("t1.csv")) == 0);
    REQUIRE(fx.run(tsne_args + fx.path("t2.csv")) == 0);
    CHECK(fx.slurp("t1.csv") == fx.slurp("t2.csv"));
    CHECK(fx.run("project tsne -i " + fx.path("sq.csv") +
                 " --perplexity 2000 -o " + fx.path("t3.csv")) == 1);
  }

  SUBCASE("strict metric mode rejects non-metric distance matrices") {
    std::ofstream lay(fx.path("lay.csv"));
    lay << "0,0\n1,0\n0,1\n2,2\n1,3\n";
    lay.close();
    std::ofstream dist(fx.path("d.csv"));
    // d(0,1) = 10 breaks the triangle inequality via d(0,2)+d(2,1) = 2.
    dist << "0,10,1,1,1\n10,0,1,1,1\n1,1,0,1,1\n1,1,1,0,1\n1,1,1,1,0\n";
    dist.close();
    CHECK(fx.run("metrics -d " + fx.path("d.csv") + " -l " + fx.path("lay.csv") +
                 " --k 2 --strict-metric") == 1);
    CHECK(fx.slurp("stderr.txt").find("TriangleInequalityViolated") !=
          std::string::npos);
    // Default mode clamps instead and succeeds with a warning.
    CHECK(fx.run("metrics -d " + fx.path("d.csv") + " -l " + fx.path("lay.csv") +
                 " --k 2") == 0);
    CHECK(fx.slurp("stderr.txt").find("clamped") != std::string::npos);
  }
}
