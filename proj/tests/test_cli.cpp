#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#ifdef __unix__
#include <sys/wait.h>
#endif
#include <fstream>
#include <sstream>
#include <string>

#ifndef CGFIT_BIN
#error "CGFIT_BIN must point at the cli binary"
#endif

namespace {

namespace fs = std::filesystem;

const fs::path kScratch = "cli_scratch";

int run(const std::string& args) {
  const std::string cmd = std::string(CGFIT_BIN) + " " + args + " > " +
                          (kScratch / "stdout.txt").string() + " 2> " +
                          (kScratch / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  if (status < 0) return -1;
#ifdef WIFEXITED
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
  return status;
#endif
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct ScratchDir {
  ScratchDir() {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
};

std::string p(const std::string& name) { return (kScratch / name).string(); }

}  // namespace

TEST_CASE("cli end to end") {
  ScratchDir scratch;

  SUBCASE("help exits cleanly") {
    CHECK(run("--help") == 0);
    CHECK(run("simulate --help") == 0);
  }

  SUBCASE("usage errors exit 2") {
    CHECK(run("") == 2);                         // missing subcommand
    CHECK(run("frobnicate") == 2);               // unknown subcommand
    CHECK(run("simulate iid --n 10") == 2);      // missing required --out
    CHECK(run("simulate iid --bogus 1 --out " + p("x.csv")) == 2);
  }

  SUBCASE("missing input exits 2, malformed input exits 1") {
    CHECK(run("fit --method fm --data " + p("absent.csv") + " --out " + p("f.json")) == 2);
    std::ofstream(p("garbage.csv")) << "x_1\n1.0\nnot-a-number\n";
    CHECK(run("fit --method fm --data " + p("garbage.csv") + " --out " + p("f.json")) == 1);
    std::ofstream(p("noforce.csv")) << "x_1\n0.1\n-0.3\n0.2\n";
    // Parses fine but force matching needs forces: numeric/data error -> 1.
    CHECK(run("fit --method fm --data " + p("noforce.csv") + " --out " + p("f.json")) == 1);
  }

  SUBCASE("simulate, fit, ci, export pipeline with sidecars") {
    REQUIRE(run("--seed 42 simulate iid --n 300 --out " + p("data.csv")) == 0);
    CHECK(fs::exists(p("data.csv")));
    REQUIRE(fs::exists(p("data.csv.meta.json")));
    const std::string meta = slurp(p("data.csv.meta.json"));
    CHECK(meta.find("\"seed\": 42") != std::string::npos);
    CHECK(meta.find("\"command\": \"simulate iid\"") != std::string::npos);
    CHECK(meta.find("config_hash") != std::string::npos);

    REQUIRE(run("fit --method fm --data " + p("data.csv") + " --out " + p("fit.json")) == 0);
    const std::string fit_json = slurp(p("fit.json"));
    CHECK(fit_json.find("\"method\": \"fm-iid\"") != std::string::npos);

    REQUIRE(run("ci --method asymptotic --estimate " + p("fit.json") + " --data " +
                p("data.csv") + " --out " + p("report.csv") + " --json " + p("report.json")) == 0);
    const std::string report = slurp(p("report.csv"));
    CHECK(report.find("param,estimate,variance,lower,upper,method,alpha") != std::string::npos);
    CHECK(report.find("theta_2") != std::string::npos);

    REQUIRE(run("ci --method bootstrap-percentile --bootstrap-b 30 --estimate " + p("fit.json") +
                " --data " + p("data.csv") + " --out " + p("boot.csv")) == 0);
    CHECK(slurp(p("boot.csv")).find("bootstrap-percentile") != std::string::npos);

    // A force-matching fit often carries a small odd leading coefficient whose
    // implied potential does not confine, so the density export uses the
    // equilibrium fit.
    REQUIRE(run("fit --method re --data " + p("data.csv") + " --out " + p("refit.json")) == 0);
    REQUIRE(run("export density --estimate " + p("refit.json") + " --out " +
                p("density.csv")) == 0);
    CHECK(slurp(p("density.csv")).find("x,density") != std::string::npos);
    REQUIRE(run("export drift --estimate " + p("fit.json") + " --grid-points 11 --out " +
                p("drift.csv")) == 0);
    CHECK(slurp(p("drift.csv")).find("x,drift") != std::string::npos);
  }

  SUBCASE("reruns and thread counts are byte identical") {
    REQUIRE(run("--seed 9 simulate iid --n 150 --out " + p("a.csv")) == 0);
    REQUIRE(run("--seed 9 simulate iid --n 150 --out " + p("b.csv")) == 0);
    CHECK(slurp(p("a.csv")) == slurp(p("b.csv")));

    REQUIRE(run("--seed 9 simulate paths --paths 4 --records 60 --out " + p("p1.csv") +
                " --threads 1") == 0);
    REQUIRE(run("--seed 9 simulate paths --paths 4 --records 60 --out " + p("p4.csv") +
                " --threads 4") == 0);
    CHECK(slurp(p("p1.csv")) == slurp(p("p4.csv")));

    REQUIRE(run("fit --method rer --data " + p("p1.csv") + " --out " + p("r1.json")) == 0);
    REQUIRE(run("fit --method rer --data " + p("p4.csv") + " --out " + p("r4.json")) == 0);
    CHECK(slurp(p("r1.json")) == slurp(p("r4.json")));

    // Bootstrap over paths, serial vs threaded.
    REQUIRE(run("--seed 3 --threads 1 ci --method bootstrap-standard --bootstrap-b 20 "
                "--estimate " + p("r1.json") + " --data " + p("p1.csv") + " --out " +
                p("ci1.csv")) == 0);
    REQUIRE(run("--seed 3 --threads 4 ci --method bootstrap-standard --bootstrap-b 20 "
                "--estimate " + p("r1.json") + " --data " + p("p1.csv") + " --out " +
                p("ci4.csv")) == 0);
    CHECK(slurp(p("ci1.csv")) == slurp(p("ci4.csv")));
  }

  SUBCASE("config file supplies options and rejects unknown keys") {
    std::ofstream(p("run.toml")) << "seed=777\n\n[simulate.iid]\nn=80\nout=\"" << p("cfg.csv")
                                 << "\"\n";
    REQUIRE(run("--config " + p("run.toml") + " simulate iid") == 0);
    CHECK(fs::exists(p("cfg.csv")));
    CHECK(slurp(p("cfg.csv.meta.json")).find("\"seed\": 777") != std::string::npos);

    // Command line overrides the file.
    REQUIRE(run("--config " + p("run.toml") + " --seed 778 simulate iid --out " +
                p("cfg2.csv")) == 0);
    CHECK(slurp(p("cfg2.csv.meta.json")).find("\"seed\": 778") != std::string::npos);

    std::ofstream(p("bad.toml")) << "seed=777\nunknown_key=1\n";
    CHECK(run("--config " + p("bad.toml") + " simulate iid --out " + p("cfg3.csv")) == 2);
  }

  SUBCASE("pair pipeline") {
    REQUIRE(run("--seed 12 simulate pairs --configs 6 --particles 27 --box 4.2 --k 8 "
                "--kind cubic-bspline --r-min 0.35 --r-max 1.3 --out " + p("pairs.csv") +
                " --truth-out " + p("truth.json")) == 0);
    REQUIRE(run("fit --method pair --data " + p("pairs.csv") + " --k 8 --kind cubic-bspline "
                "--r-min 0.35 --r-max 1.3 --out " + p("pairfit.json")) == 0);
    CHECK(slurp(p("pairfit.json")).find("\"method\": \"pair-fm\"") != std::string::npos);
    REQUIRE(run("ci --qoi potential --method bootstrap-percentile --bootstrap-b 20 --estimate " +
                p("pairfit.json") + " --data " + p("pairs.csv") + " --grid-points 12 --out " +
                p("band.csv")) == 0);
    CHECK(slurp(p("band.csv")).find("r,u,lower,upper") != std::string::npos);
    REQUIRE(run("export potential --estimate " + p("pairfit.json") + " --grid-points 9 --out " +
                p("pot.csv")) == 0);
    CHECK(slurp(p("pot.csv")).find("r,u") != std::string::npos);
  }

  SUBCASE("validate compare prints a table") {
    REQUIRE(run("--seed 5 validate compare --n-iid 150 --records 1500 --out " +
                p("compare.csv")) == 0);
    const std::string table = slurp(p("stdout.txt"));
    CHECK(table.find("fm-iid") != std::string::npos);
    CHECK(table.find("re-iid") != std::string::npos);
    CHECK(table.find("rer") != std::string::npos);
    const std::string csv = slurp(p("compare.csv"));
    CHECK(csv.find("method,param,estimate") != std::string::npos);
  }
}
