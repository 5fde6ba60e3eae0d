#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace dbc {

/// Two-class dataset. Samples are stored one per column (dimension x count) so that
/// a sample is a contiguous vector and batches feed straight into matrix products.
///
/// Invariants enforced at construction: labels in {0, 1}, at least one sample of each
/// class, all features finite.
class LabeledDataset {
 public:
  LabeledDataset(Eigen::MatrixXd points, std::vector<int> labels);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t count() const noexcept { return static_cast<std::size_t>(points_.cols()); }

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// Row indices carrying `label`, ascending.
  const std::vector<std::size_t>& class_indices(int label) const;

  /// Per-feature min-max rescaling to [0, 1]; constant features map to 0.
  LabeledDataset minmax_scaled() const;

 private:
  Eigen::MatrixXd points_;
  std::vector<int> labels_;
  std::array<std::vector<std::size_t>, 2> by_class_;
};

/// Label column selector for load_csv: a header name or a zero-based column index.
using LabelColumn = std::variant<std::string, std::size_t>;

/// Reads a comma-separated file. A header row is detected when the first line has a
/// non-numeric cell. With a header, the label column defaults to "label"; without
/// one, to the last column.
LabeledDataset load_csv(const std::filesystem::path& path,
                        const LabelColumn& label_column = std::string("label"));

/// Writes `f0,...,f{n-1},label` followed by one row per sample at round-trip precision.
void save_csv(const LabeledDataset& dataset, const std::filesystem::path& path);

struct BlobsConfig {
  std::size_t per_class = 200;
  std::size_t dimension = 2;
  double center_distance = 10.0;
  double spread = 1.0;
  std::uint64_t seed = 0;
};

/// Two isotropic Gaussian clusters with centers at -d/2 and +d/2 along the first
/// axis. Class 0 rows come first, then class 1.
LabeledDataset make_blobs(const BlobsConfig& config);

/// Indices of the k rows of class `class_filter` nearest (Euclidean) to `query`,
/// ordered by distance with ties broken by lower row index. A stored row equal to the
/// query ranks first at distance zero.
std::vector<std::size_t> k_nearest(const LabeledDataset& dataset,
                                   const Eigen::Ref<const Eigen::VectorXd>& query,
                                   int class_filter, std::size_t k);

struct ClassPair {
  std::size_t index_a;  // label 0
  std::size_t index_b;  // label 1
};

/// `reps` cross-class pairs drawn uniformly with replacement. Pair i is drawn from its
/// own stream (seed, i), so the sequence is reproducible under any evaluation order.
std::vector<ClassPair> sample_pairs(const LabeledDataset& dataset, std::size_t reps,
                                    std::uint64_t seed);

/// The i-th pair of the sequence sample_pairs(dataset, *, seed) would produce.
ClassPair sample_pair(const LabeledDataset& dataset, std::uint64_t seed, std::size_t i);

}  // namespace dbc
