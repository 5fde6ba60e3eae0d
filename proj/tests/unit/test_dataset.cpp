#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "dbc/dataset.hpp"
#include "dbc/error.hpp"
#include "dbc/parallel.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& contents) {
  const fs::path path = fs::temp_directory_path() / ("dbc_test_" + name);
  std::ofstream(path, std::ios::binary) << contents;
  return path;
}

}  // namespace

TEST(LoadCsv, ParsesHeaderedFile) {
  const auto path = temp_file("four.csv", "x,y,label\n0,0,0\n1,0.5,0\n3,3,1\n4,2.5,1\n");
  const auto data = dbc::load_csv(path);
  EXPECT_EQ(data.count(), 4u);
  EXPECT_EQ(data.dimension(), 2u);
  EXPECT_EQ(data.label(2), 1);
  EXPECT_DOUBLE_EQ(data.point(1)(1), 0.5);
}

TEST(LoadCsv, HeaderlessUsesLastColumnAndIndexSelector) {
  const auto path = temp_file("noheader.csv", "1,0,2\n0,1,3\n");
  const auto data = dbc::load_csv(path, std::size_t{1});
  EXPECT_EQ(data.count(), 2u);
  EXPECT_EQ(data.label(0), 0);
  EXPECT_EQ(data.label(1), 1);
  EXPECT_DOUBLE_EQ(data.point(1)(1), 3.0);
}

TEST(LoadCsv, ThirtyFeatureTable) {
  std::string text;
  for (int f = 0; f < 30; ++f) text += "f" + std::to_string(f) + ",";
  text += "label\n";
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int r = 0; r < 587; ++r) {
    for (int f = 0; f < 30; ++f) text += std::to_string(g(rng)) + ",";
    text += (r < 212 ? "1\n" : "0\n");
  }
  const auto data = dbc::load_csv(temp_file("thirty.csv", text));
  EXPECT_EQ(data.count(), 587u);
  EXPECT_EQ(data.dimension(), 30u);
  EXPECT_EQ(data.class_indices(1).size(), 212u);
  EXPECT_EQ(data.class_indices(0).size(), 375u);
}

TEST(LoadCsv, RejectsLabelOutsideBinaryNamingRow) {
  const auto path = temp_file("badlabel.csv", "a,label\n0.1,0\n0.2,2\n0.3,1\n");
  try {
    dbc::load_csv(path);
    FAIL() << "expected DataError";
  } catch (const dbc::DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, ReportsUnparseableCellPosition) {
  const auto path = temp_file("badcell.csv", "a,b,label\n0.1,0.2,0\n0.3,oops,1\n");
  try {
    dbc::load_csv(path);
    FAIL() << "expected DataError";
  } catch (const dbc::DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
  }
}

TEST(LoadCsv, RejectsMissingFileAndSingleClass) {
  EXPECT_THROW(dbc::load_csv("/nonexistent/dbc.csv"), dbc::DataError);
  EXPECT_THROW(dbc::load_csv(temp_file("oneclass.csv", "a,label\n1,0\n2,0\n")), dbc::DataError);
  EXPECT_THROW(dbc::load_csv(temp_file("nan.csv", "a,label\nnan,0\n2,1\n")), dbc::DataError);
  EXPECT_THROW(dbc::load_csv(temp_file("nolabel.csv", "a,b\n1,0\n2,1\n"), std::string("label")),
               dbc::DataError);
}

TEST(SaveCsv, RoundTripsExactly) {
  const auto data = dbc::make_blobs({.per_class = 7, .dimension = 3, .seed = 11});
  const auto path = fs::temp_directory_path() / "dbc_test_roundtrip.csv";
  dbc::save_csv(data, path);
  const auto back = dbc::load_csv(path);
  EXPECT_EQ(back.points(), data.points());
  EXPECT_EQ(back.labels(), data.labels());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "f0,f1,f2,label");
}

TEST(MakeBlobs, CountsAndBalance) {
  const auto data = dbc::make_blobs({.per_class = 200, .dimension = 2, .seed = 7});
  EXPECT_EQ(data.count(), 400u);
  EXPECT_EQ(data.class_indices(0).size(), 200u);
  EXPECT_EQ(data.class_indices(1).size(), 200u);
}

TEST(MakeBlobs, DeterministicForSeed) {
  const dbc::BlobsConfig config{.per_class = 50, .dimension = 4, .seed = 99};
  const auto first = dbc::make_blobs(config);
  const auto second = dbc::make_blobs(config);
  EXPECT_EQ(first.points(), second.points());
  auto other = config;
  other.seed = 100;
  EXPECT_NE(dbc::make_blobs(other).points(), first.points());
}

TEST(MakeBlobs, WellSeparatedBlobsAreThresholdSeparable) {
  const auto data = dbc::make_blobs(
      {.per_class = 200, .dimension = 2, .center_distance = 10.0, .spread = 1.0, .seed = 5});
  // Oracle: exhaustive search over every threshold between consecutive projections.
  std::vector<std::pair<double, int>> proj;
  for (std::size_t i = 0; i < data.count(); ++i) proj.emplace_back(data.point(i)(0), data.label(i));
  std::sort(proj.begin(), proj.end());
  double best = 0.0;
  for (std::size_t cut = 0; cut <= proj.size(); ++cut) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < proj.size(); ++i) correct += (i >= cut) == (proj[i].second == 1);
    best = std::max(best, static_cast<double>(correct) / static_cast<double>(proj.size()));
  }
  EXPECT_EQ(best, 1.0);
}

TEST(MakeBlobs, RejectsNonpositiveArguments) {
  EXPECT_THROW(dbc::make_blobs({.per_class = 0}), dbc::UsageError);
  EXPECT_THROW(dbc::make_blobs({.spread = 0.0}), dbc::UsageError);
  EXPECT_THROW(dbc::make_blobs({.center_distance = -1.0}), dbc::UsageError);
}

TEST(KNearest, StoredQueryRanksFirst) {
  const auto data = dbc::make_blobs({.per_class = 30, .dimension = 3, .seed = 2});
  for (std::size_t i : data.class_indices(1)) {
    const auto nn = dbc::k_nearest(data, data.point(i), 1, 1);
    ASSERT_EQ(nn.size(), 1u);
    EXPECT_EQ(nn[0], i);
  }
}

TEST(KNearest, ThreeAroundBIncludesB) {
  const auto data = dbc::make_blobs({.per_class = 30, .dimension = 2, .seed = 4});
  const std::size_t b = data.class_indices(1)[5];
  const auto nn = dbc::k_nearest(data, data.point(b), 1, 3);
  ASSERT_EQ(nn.size(), 3u);
  EXPECT_EQ(nn[0], b);
  for (auto i : nn) EXPECT_EQ(data.label(i), 1);
}

TEST(KNearest, MatchesExhaustiveSortOnRandomSets) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t count = 50 + static_cast<std::size_t>(trial) * 3;
    Eigen::MatrixXd pts(4, static_cast<Eigen::Index>(count));
    std::vector<int> labels(count);
    for (std::size_t j = 0; j < count; ++j) {
      for (int r = 0; r < 4; ++r) pts(r, static_cast<Eigen::Index>(j)) = g(rng);
      labels[j] = j % 2 == 0 ? 0 : 1;
    }
    const dbc::LabeledDataset data(pts, labels);
    Eigen::VectorXd q(4);
    for (int r = 0; r < 4; ++r) q(r) = g(rng);
    for (int label : {0, 1}) {
      EXPECT_EQ(dbc::k_nearest(data, q, label, 5), oracle::knn_by_full_sort(data, q, label, 5));
    }
  }
}

TEST(KNearest, TiesBreakByLowerIndex) {
  Eigen::MatrixXd pts(1, 5);
  pts << 1.0, -1.0, 1.0, -1.0, 0.0;
  const dbc::LabeledDataset data(pts, {1, 1, 1, 1, 0});
  Eigen::VectorXd q(1);
  q << 0.0;
  EXPECT_EQ(dbc::k_nearest(data, q, 1, 4), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(KNearest, Errors) {
  const auto data = dbc::make_blobs({.per_class = 3, .dimension = 2, .seed = 1});
  Eigen::VectorXd q = Eigen::VectorXd::Zero(2);
  EXPECT_THROW(dbc::k_nearest(data, q, 1, 4), dbc::DataError);
  EXPECT_THROW(dbc::k_nearest(data, Eigen::VectorXd::Zero(3), 1, 1), dbc::DataError);
  EXPECT_THROW(dbc::k_nearest(data, q, 1, 0), dbc::UsageError);
}

TEST(SamplePairs, CountsAndClasses) {
  const auto data = dbc::make_blobs({.per_class = 200, .dimension = 30, .seed = 3});
  const auto pairs = dbc::sample_pairs(data, 2500, 42);
  ASSERT_EQ(pairs.size(), 2500u);
  for (const auto& p : pairs) {
    EXPECT_EQ(data.label(p.index_a), 0);
    EXPECT_EQ(data.label(p.index_b), 1);
  }
}

TEST(SamplePairs, SingletonClassesForcePair) {
  Eigen::MatrixXd pts(2, 2);
  pts << 0.0, 1.0, 0.0, 1.0;
  const dbc::LabeledDataset data(pts, {1, 0});
  const auto pairs = dbc::sample_pairs(data, 1, 0);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].index_a, 1u);
  EXPECT_EQ(pairs[0].index_b, 0u);
}

TEST(SamplePairs, SerialAndParallelAgree) {
  const auto data = dbc::make_blobs({.per_class = 40, .dimension = 2, .seed = 3});
  const auto serial = dbc::sample_pairs(data, 500, 9);
  std::vector<dbc::ClassPair> parallel(500);
  dbc::parallel_for(500, 8, [&](std::size_t i) { parallel[i] = dbc::sample_pair(data, 9, i); });
  for (std::size_t i = 0; i < 500; ++i) {
    EXPECT_EQ(serial[i].index_a, parallel[i].index_a);
    EXPECT_EQ(serial[i].index_b, parallel[i].index_b);
  }
  const auto again = dbc::sample_pairs(data, 500, 9);
  for (std::size_t i = 0; i < 500; ++i) EXPECT_EQ(serial[i].index_a, again[i].index_a);
}

TEST(Dataset, InvariantsEnforced) {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_THROW(dbc::LabeledDataset(pts, {0, 2}), dbc::DataError);
  EXPECT_THROW(dbc::LabeledDataset(pts, {0, 0}), dbc::DataError);
  EXPECT_THROW(dbc::LabeledDataset(pts, {0}), dbc::DataError);
  pts(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(dbc::LabeledDataset(pts, {0, 1}), dbc::DataError);
}

TEST(Dataset, MinmaxScalingMapsToUnitInterval) {
  const auto data = dbc::make_blobs({.per_class = 20, .dimension = 3, .seed = 8}).minmax_scaled();
  for (Eigen::Index r = 0; r < 3; ++r) {
    EXPECT_DOUBLE_EQ(data.points().row(r).minCoeff(), 0.0);
    EXPECT_DOUBLE_EQ(data.points().row(r).maxCoeff(), 1.0);
  }
}
