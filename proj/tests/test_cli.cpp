#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ciforge/csv_io.hpp"
#include "ciforge/simulation.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using namespace ciforge;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ciforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("ciforge_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate writes a prediction file and a truth file") {
    TempDir dir;
    const auto r = invoke({"simulate", "--n", "500", "--configs", "100", "--balance", "0.5", "--alpha", "24",
                        "--beta", "6", "--seed", "1", "--rep", "0", "--out-dir", dir.path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("folds: 10") != std::string::npos);
    const auto pm = read_prediction_csv(dir / "preds.csv");
    CHECK(pm.samples() == 500);
    CHECK(pm.configs() == 100);
    CHECK(pm.folds() == 10);
    CHECK(read_truth_csv(dir / "truth.csv").size() == 100);
  }

  TEST_CASE("written scores read back exactly") {
    TempDir dir;
    REQUIRE(invoke({"simulate", "--n", "60", "--configs", "9", "--seed", "5", "--rep", "2", "--out-dir",
                 dir.path.string()})
                .code == 0);
    SimScenario s;
    s.samples = 60;
    s.configs = 9;
    s.seed = 5;
    const auto expected = generate_scenario(s, 2);
    const auto pm = read_prediction_csv(dir / "preds.csv");
    for (std::size_t j = 0; j < 9; ++j) {
      for (std::size_t i = 0; i < 60; ++i) REQUIRE(pm.score(i, j) == expected.pm.score(i, j));
    }
    // fold ids are renumbered on read, so compare the partitions
    std::map<std::uint32_t, std::uint32_t> relabel;
    for (std::size_t i = 0; i < 60; ++i) {
      const auto [it, fresh] = relabel.try_emplace(expected.pm.fold_of()[i], pm.fold_of()[i]);
      REQUIRE(it->second == pm.fold_of()[i]);
    }
    CHECK(relabel.size() == pm.folds());
    CHECK(read_truth_csv(dir / "truth.csv") == expected.true_auc);
  }

  TEST_CASE("simulate rejects a majority-class balance") {
    TempDir dir;
    const auto r = invoke({"simulate", "--balance", "0.7", "--out-dir", dir.path.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("minority probability must be <= 0.5") != std::string::npos);
  }

  TEST_CASE("estimate prints the JSON report") {
    TempDir dir;
    REQUIRE(invoke({"simulate", "--n", "100", "--configs", "10", "--out-dir", dir.path.string()}).code == 0);
    const auto r = invoke({"estimate", "--in", dir / "preds.csv", "--method", "bbc-f", "--coverage", "0.95",
                        "--sided", "one", "--bootstraps", "1000", "--seed", "7", "--out", dir / "r.json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    for (const char* key : {"method", "winner_index", "point_estimate", "ci_low", "ci_high", "coverage", "sided",
                            "B", "seed", "n", "c", "k", "schema_version"}) {
      CHECK(doc.contains(key));
    }
    CHECK(doc["method"] == "bbc-f");
    CHECK(doc["B"] == 1000);
    CHECK(doc["k"] == 10);
    CHECK(slurp(dir / "r.json") == r.out);

    const auto again = invoke({"estimate", "--in", dir / "preds.csv", "--method", "bbc-f", "--bootstraps", "1000",
                            "--seed", "7", "--jobs", "8"});
    CHECK(again.out == r.out);
  }

  TEST_CASE("a single configuration triggers a warning") {
    TempDir dir;
    write(dir / "one.csv",
          "sample_id,fold,label,c0\na,0,0,0.1\nb,0,1,0.8\nc,1,0,0.3\nd,1,1,0.6\ne,2,0,0.2\nf,2,1,0.9\n");
    const auto r = invoke({"estimate", "--in", dir / "one.csv", "--method", "nb", "--bootstraps", "100"});
    CHECK(r.code == 0);
    CHECK(r.err.find("no selection bias with a single configuration") != std::string::npos);
  }

  TEST_CASE("malformed input reports the line") {
    TempDir dir;
    write(dir / "bad.csv", "sample_id,fold,label,c0,c1\na,0,0,0.1,0.2\nb,0,1,0.8\n");
    const auto r = invoke({"estimate", "--in", dir / "bad.csv"});
    CHECK(r.code == 1);
    CHECK(r.err.find("line 3") != std::string::npos);

    write(dir / "worse.csv", "sample_id,fold,label,c0\na,0,1,zero\n");
    const auto r2 = invoke({"estimate", "--in", dir / "worse.csv"});
    CHECK(r2.code == 1);
    CHECK(r2.err.find("line 2") != std::string::npos);

    CHECK(invoke({"estimate", "--in", dir / "missing.csv"}).code == 1);
    CHECK(invoke({"estimate"}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
  }

  TEST_CASE("estimation failures exit with 2") {
    TempDir dir;
    write(dir / "onefold.csv", "sample_id,fold,label,c0\na,0,0,0.1\nb,0,1,0.8\nc,0,0,0.3\nd,0,1,0.6\n");
    const auto r = invoke({"estimate", "--in", dir / "onefold.csv", "--method", "bbc-f", "--bootstraps", "100"});
    CHECK(r.code == 2);
  }

  TEST_CASE("invalid estimator settings exit with 1") {
    TempDir dir;
    REQUIRE(invoke({"simulate", "--n", "40", "--configs", "3", "--out-dir", dir.path.string()}).code == 0);
    CHECK(invoke({"estimate", "--in", dir / "preds.csv", "--bootstraps", "10"}).code == 1);
    CHECK(invoke({"estimate", "--in", dir / "preds.csv", "--coverage", "1.5"}).code == 1);
    CHECK(invoke({"estimate", "--in", dir / "preds.csv", "--method", "jackknife"}).code == 1);
  }

  TEST_CASE("benchmark writes reports and rejects zero repetitions") {
    TempDir dir;
    write(dir / "spec.json",
          R"({"scenarios":[{"n":40,"configs":5,"balance":0.5,"alpha":24,"beta":6}],"methods":["bbc","bbc-f","nb"],"reps":3,"coverage":0.95,"bootstraps":100,"sided":"one","seed":1})");
    const auto r = invoke({"benchmark", "--spec", dir / "spec.json", "--out-dir", dir / "out", "--run-log"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "out/report.json"));
    CHECK(slurp(dir / "out/report.txt") == r.out);
    CHECK(slurp(dir / "out/run_log.csv").find("bbc-f") != std::string::npos);

    write(dir / "zero.json", R"({"scenarios":[{"n":40,"configs":5,"balance":0.5,"alpha":24,"beta":6}],"reps":0})");
    CHECK(invoke({"benchmark", "--spec", dir / "zero.json", "--out-dir", dir / "out2"}).code == 1);
    write(dir / "broken.json", "{ not json");
    CHECK(invoke({"benchmark", "--spec", dir / "broken.json"}).code == 1);
  }

  TEST_CASE("bench-time prints a timing table") {
    const auto r = invoke({"bench-time", "--axis", "n", "--values", "100,200", "--reps", "2", "--bootstraps", "50"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("axis,value,bbc_total_ms", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
    CHECK(invoke({"bench-time", "--axis", "q", "--values", "1"}).code == 1);
  }

  TEST_CASE("help exits cleanly") {
    const auto r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("estimate") != std::string::npos);
  }
}
