#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "app.hpp"
#include "dbc/model.hpp"
#include "io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome dbc_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dbc::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dbc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv(dbc::cli::kWorkersEnv);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string blobs(std::size_t dim = 2, const std::string& seed = "7", std::size_t per_class = 200) {
    const std::string out = path("blobs_" + std::to_string(dim) + "_" + seed + ".csv");
    const auto r = dbc_run({"blobs", "--per-class", std::to_string(per_class), "--dim",
                            std::to_string(dim), "--seed", seed, "--out", out});
    EXPECT_EQ(r.code, 0) << r.err;
    return out;
  }

  std::string train(const std::string& data, const std::string& arch, const std::string& name,
                    std::vector<std::string> extra = {}) {
    const std::string out = path(name);
    std::vector<std::string> args{"train", "--data", data, "--arch", arch, "--lr", "0.01",
                                  "--seed", "1", "--out", out};
    if (std::find(extra.begin(), extra.end(), "--epochs") == extra.end()) extra.insert(extra.end(), {"--epochs", "60"});
    args.insert(args.end(), extra.begin(), extra.end());
    const auto r = dbc_run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return out;
  }

  fs::path dir_;
};

std::size_t data_rows(const std::string& file) {
  std::istringstream in(dbc::cli::read_text(file));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n - 1;
}

}  // namespace

TEST_F(Cli, BlobsWritesFourHundredRowsDeterministically) {
  const std::string a = blobs();
  EXPECT_EQ(data_rows(a), 400u);
  const std::string hash = dbc::cli::sha256_file(a);
  fs::remove(a);
  blobs();
  EXPECT_EQ(dbc::cli::sha256_file(a), hash);
  EXPECT_TRUE(fs::exists(a + ".manifest.json"));
}

TEST_F(Cli, BlobsRejectsZeroPerClass) {
  const auto r = dbc_run({"blobs", "--per-class", "0", "--out", path("x.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(dbc_run({}).code, 1);
  EXPECT_EQ(dbc_run({"frobnicate"}).code, 1);
  EXPECT_EQ(dbc_run({"blobs"}).code, 1);
  EXPECT_EQ(dbc_run({"blobs", "--out", path("x.csv"), "--dim", "two"}).code, 1);
  EXPECT_EQ(dbc_run({"--help"}).code, 0);
}

TEST_F(Cli, TrainReportsParameterCounts) {
  const std::string data = blobs();
  const std::string simple = train(data, "2,1,1", "simple.json");
  const json report = json::parse(dbc::cli::read_text(simple + ".report.json"));
  EXPECT_EQ(report["parameter_count"], 5);
  EXPECT_EQ(report["final_train_accuracy"], 1.0);

  const std::string complex = train(data, "2,10,32,16,1", "complex.json");
  EXPECT_EQ(json::parse(dbc::cli::read_text(complex + ".report.json"))["parameter_count"], 927);
  EXPECT_EQ(dbc::load_model(complex).parameter_count(), 927u);
}

TEST_F(Cli, TrainDimensionMismatchIsDataError) {
  const std::string data = blobs();
  const auto r = dbc_run({"train", "--data", data, "--arch", "3,1", "--out", path("m.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("dimension"), std::string::npos);
}

TEST_F(Cli, TrainDivergenceIsNumericalError) {
  const std::string data = blobs();
  const auto r = dbc_run({"train", "--data", data, "--arch", "2,8,1", "--optimizer", "sgd", "--lr",
                          "1e306", "--epochs", "5", "--out", path("m.json")});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(Cli, MissingOrCorruptInputsAreDataErrors) {
  const std::string data = blobs();
  EXPECT_EQ(dbc_run({"train", "--data", path("nope.csv"), "--arch", "2,1", "--out", path("m.json")}).code, 2);
  dbc::cli::write_text(path("broken.json"), "{\"format\": \"dbc-model/1\", \"layer_sizes\": [2,");
  EXPECT_EQ(dbc_run({"score", "--model", path("broken.json"), "--data", data, "--out", path("s.csv")}).code,
            2);
}

TEST_F(Cli, LocalScoresOnThirtyDimensions) {
  const std::string data = blobs(30, "3", 100);
  const std::string model = train(data, "30,8,1", "m30.json");
  const std::string out = path("s30.csv");
  const auto r = dbc_run({"score", "--model", model, "--data", data, "--mode", "local", "--k", "30",
                          "--reps", "2500", "--seed", "5", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto file = dbc::cli::load_scores(out);
  EXPECT_EQ(file.rows.size(), 2500u);
  for (const auto& row : file.rows) {
    EXPECT_EQ(row.m, 31u);
    EXPECT_EQ(row.k, 30u);
    EXPECT_GE(row.dbc, 0.0);
    EXPECT_LE(row.dbc, 1.0);
  }
  EXPECT_EQ(file.get("seed"), "5");
  EXPECT_EQ(file.get("dataset_sha256"), dbc::cli::sha256_file(data));
  EXPECT_EQ(file.get("model_sha256"), dbc::cli::sha256_file(model));
}

TEST_F(Cli, DefaultRepsAreFiveTimesDatasetSize) {
  const std::string data = blobs(2, "7", 30);
  const std::string model = train(data, "2,1,1", "m.json");
  ASSERT_EQ(dbc_run({"score", "--model", model, "--data", data, "--k", "3", "--out", path("s.csv")}).code, 0);
  EXPECT_EQ(dbc::cli::load_scores(path("s.csv")).get("reps"), "300");
}

TEST_F(Cli, WorkerCountDoesNotChangeBytes) {
  const std::string data = blobs();
  const std::string model = train(data, "2,10,32,16,1", "m.json");
  std::map<std::string, std::string> hashes;
  for (const std::string w : {"1", "8"}) {
    const std::string out = path("s" + w + ".csv");
    ASSERT_EQ(dbc_run({"score", "--model", model, "--data", data, "--k", "10", "--reps", "400",
                       "--seed", "9", "--workers", w, "--out", out})
                  .code,
              0);
    hashes[w] = dbc::cli::sha256_file(out);
  }
  setenv(dbc::cli::kWorkersEnv, "3", 1);
  EXPECT_EQ(dbc::cli::default_workers(), 3u);
  ASSERT_EQ(dbc_run({"score", "--model", model, "--data", data, "--k", "10", "--reps", "400", "--seed",
                     "9", "--out", path("env.csv")})
                .code,
            0);
  EXPECT_EQ(hashes["1"], hashes["8"]);
  EXPECT_EQ(hashes["1"], dbc::cli::sha256_file(path("env.csv")));

  setenv(dbc::cli::kWorkersEnv, "many", 1);
  EXPECT_EQ(dbc_run({"score", "--model", model, "--data", data, "--reps", "10", "--out", path("x.csv")}).code,
            1);
}

TEST_F(Cli, GlobalModeWritesOneRow) {
  const std::string data = blobs();
  const std::string model = train(data, "2,1,1", "m.json");
  ASSERT_EQ(dbc_run({"score", "--model", model, "--data", data, "--mode", "global", "--reps", "500",
                     "--out", path("g.csv")})
                .code,
            0);
  const auto file = dbc::cli::load_scores(path("g.csv"));
  ASSERT_EQ(file.rows.size(), 1u);
  EXPECT_EQ(file.rows[0].pair_index, -1);
  EXPECT_EQ(file.rows[0].m, 500u);
  EXPECT_LT(file.rows[0].dbc, 0.05);
}

TEST_F(Cli, ScoreFlagValidation) {
  const std::string data = blobs();
  const std::string model = train(data, "2,1,1", "m.json");
  auto score = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"score", "--model", model, "--data", data, "--reps", "20",
                                  "--out", path("s.csv")};
    args.insert(args.end(), extra.begin(), extra.end());
    return dbc_run(args).code;
  };
  EXPECT_EQ(score({"--epsilon", "2"}), 1);
  EXPECT_EQ(score({"--epsilon", "1/0"}), 1);
  EXPECT_EQ(score({"--mode", "sideways"}), 1);
  EXPECT_EQ(score({"--divisor", "natural"}), 1);
  EXPECT_EQ(score({"--k", "500"}), 2);
  EXPECT_EQ(score({"--epsilon", "1/512", "--method", "linear-scan", "--no-center", "--divisor", "paper-n"}), 0);
  const auto file = dbc::cli::load_scores(path("s.csv"));
  EXPECT_EQ(file.get("method"), "linear_scan");
  EXPECT_FALSE(file.rows.front().centered);
  EXPECT_EQ(file.rows.front().divisor_mode, "paper_n");

  const std::string data3 = blobs(3);
  EXPECT_EQ(dbc_run({"score", "--model", model, "--data", data3, "--reps", "5", "--out", path("x.csv")}).code,
            2);
}

TEST_F(Cli, CompareSimpleAgainstComplexAndItself) {
  const std::string data = blobs();
  const std::string simple = train(data, "2,1,1", "simple.json");
  const std::string complex = train(data, "2,10,32,16,1", "complex.json", {"--epochs", "300"});
  for (const auto& [m, name] : {std::pair{simple, "s.csv"}, std::pair{complex, "c.csv"}})
    ASSERT_EQ(dbc_run({"score", "--model", m, "--data", data, "--k", "10", "--reps", "1000", "--seed",
                       "4", "--out", path(name)})
                  .code,
              0);

  ASSERT_EQ(dbc_run({"compare", "--a", path("s.csv"), "--b", path("c.csv"), "--out", path("r.json")}).code, 0);
  const json report = json::parse(dbc::cli::read_text(path("r.json")));
  EXPECT_EQ(report["test"], "signed_rank_paired");
  EXPECT_EQ(report["decision"], "rejected");
  EXPECT_LT(report["p_value"].get<double>(), 0.01);
  EXPECT_LT(report["a"]["compared"]["median"].get<double>(), report["b"]["compared"]["median"].get<double>());
  EXPECT_NE(report["caveat"].get<std::string>().find("same dataset"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("r.json.manifest.json")));

  const auto self = dbc_run({"compare", "--a", path("s.csv"), "--b", path("s.csv")});
  ASSERT_EQ(self.code, 0);
  const json same = json::parse(self.out);
  EXPECT_EQ(same["p_value"], 1.0);
  EXPECT_EQ(same["decision"], "no difference");

  const auto unpaired = dbc_run({"compare", "--a", path("s.csv"), "--b", path("c.csv"), "--test", "unpaired"});
  ASSERT_EQ(unpaired.code, 0);
  EXPECT_EQ(json::parse(unpaired.out)["test"], "mann_whitney_unpaired");
}

TEST_F(Cli, PairedCompareRefusesMismatchedSeeds) {
  const std::string data = blobs();
  const std::string model = train(data, "2,1,1", "m.json");
  for (const std::string seed : {"1", "2"})
    ASSERT_EQ(dbc_run({"score", "--model", model, "--data", data, "--k", "5", "--reps", "50", "--seed",
                       seed, "--out", path("s" + seed + ".csv")})
                  .code,
              0);
  const auto r = dbc_run({"compare", "--a", path("s1.csv"), "--b", path("s2.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
  EXPECT_EQ(dbc_run({"compare", "--a", path("s1.csv"), "--b", path("s2.csv"), "--test", "unpaired"}).code, 0);
}

TEST_F(Cli, CompareRefusesDifferentDatasetsWithoutForce) {
  const std::string d1 = blobs(2, "7");
  const std::string d2 = blobs(2, "8");
  const std::string model = train(d1, "2,1,1", "m.json");
  for (const auto& [d, name] : {std::pair{d1, "a.csv"}, std::pair{d2, "b.csv"}})
    ASSERT_EQ(dbc_run({"score", "--model", model, "--data", d, "--k", "5", "--reps", "50", "--out",
                       path(name)})
                  .code,
              0);
  EXPECT_EQ(dbc_run({"compare", "--a", path("a.csv"), "--b", path("b.csv")}).code, 2);
  const auto forced = dbc_run({"compare", "--a", path("a.csv"), "--b", path("b.csv"), "--force"});
  ASSERT_EQ(forced.code, 0);
  EXPECT_EQ(json::parse(forced.out)["same_dataset"], false);
}

TEST_F(Cli, CompareRejectsEmptyScoreFile) {
  dbc::cli::write_text(path("empty.csv"), "# dbc-scores/1\n# seed=0\n# dataset_sha256=x\npair_index,k,m,dbc,divisor_mode,centered\n");
  EXPECT_EQ(dbc_run({"compare", "--a", path("empty.csv"), "--b", path("empty.csv")}).code, 2);
}

TEST_F(Cli, PlotOfLinearModelHasStraightBoundary) {
  const std::string data = blobs();
  const std::string model = train(data, "2,1,1", "m.json");
  ASSERT_EQ(dbc_run({"plot2d", "--data", data, "--model", model, "--out", path("p.svg"), "--grid", "80"}).code, 0);
  const std::string svg = dbc::cli::read_text(path("p.svg"));
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  // A half-plane splits every raster row into at most two runs.
  std::map<std::string, int> runs_per_row;
  const std::regex rect("<rect x=\"[^\"]+\" y=\"([^\"]+)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator(); ++it)
    ++runs_per_row[(*it)[1]];
  EXPECT_EQ(runs_per_row.size(), 80u);
  int split_rows = 0;
  for (const auto& [y, runs] : runs_per_row) {
    EXPECT_LE(runs, 2);
    split_rows += runs == 2;
  }
  EXPECT_GT(split_rows, 0);
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 400, true);
}

TEST_F(Cli, PlotOverlayPointsSitOnTheBoundary) {
  const std::string data = blobs();
  const std::string model = train(data, "2,10,32,16,1", "m.json", {"--epochs", "300"});
  ASSERT_EQ(dbc_run({"score", "--model", model, "--data", data, "--mode", "global", "--reps", "300",
                     "--epsilon", "1/65536", "--out", path("g.csv"), "--export-set", path("set.csv")})
                .code,
            0);
  ASSERT_EQ(dbc_run({"plot2d", "--data", data, "--model", model, "--out", path("p.svg"), "--overlay",
                     path("set.csv")})
                .code,
            0);
  const std::string svg = dbc::cli::read_text(path("p.svg"));
  EXPECT_NE(svg.find("id=\"adversarial\""), std::string::npos);

  const auto points = dbc::cli::load_adversarial_points(path("set.csv"));
  ASSERT_EQ(points.cols(), 300);
  const Eigen::VectorXd f = dbc::load_model(model).decide_batch(points);
  std::istringstream prov(dbc::cli::read_text(path("set.csv.provenance.csv")));
  std::string line;
  std::getline(prov, line);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    ASSERT_TRUE(std::getline(prov, line));
    const double recorded = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_NEAR(f(j), recorded, 1e-12);
    EXPECT_LT(std::abs(f(j) - 0.5), 0.01);
  }
}

TEST_F(Cli, PlotRefusesHighDimensionalData) {
  const std::string data = blobs(30, "3", 20);
  const std::string model = train(data, "30,1", "m.json");
  const auto r = dbc_run({"plot2d", "--data", data, "--model", model, "--out", path("p.svg")});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(path("p.svg")));
}

TEST_F(Cli, ReplayReproducesOutputs) {
  const std::string data = blobs();
  const std::string model = train(data, "2,4,1", "m.json", {"--dropout", "0.2"});
  const std::string train_hash = dbc::cli::sha256_file(model);
  ASSERT_EQ(dbc_run({"score", "--model", model, "--data", data, "--k", "5", "--reps", "100", "--out",
                     path("s.csv")})
                .code,
            0);
  const auto replay = dbc_run({"replay", path("s.csv.manifest.json")});
  EXPECT_EQ(replay.code, 0) << replay.err;
  EXPECT_NE(replay.out.find("reproduced"), std::string::npos);
  EXPECT_EQ(dbc_run({"replay", model + ".manifest.json"}).code, 0);
  EXPECT_EQ(dbc::cli::sha256_file(model), train_hash);

  const json manifest = json::parse(dbc::cli::read_text(path("s.csv.manifest.json")));
  EXPECT_EQ(manifest["format"], dbc::cli::kManifestFormat);
  EXPECT_EQ(manifest["flags"]["k"], "5");
  EXPECT_EQ(manifest["inputs"].size(), 2u);

  dbc::cli::write_text(data, dbc::cli::read_text(data) + "0,0,1\n");
  EXPECT_EQ(dbc_run({"replay", path("s.csv.manifest.json")}).code, 2);
}
