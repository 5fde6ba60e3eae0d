#include "dbc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string_view>

#include "dbc/error.hpp"
#include "dbc/random.hpp"

namespace dbc {

LabeledDataset::LabeledDataset(Eigen::MatrixXd points, std::vector<int> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (points_.rows() < 1) throw DataError("dataset dimension must be positive");
  if (static_cast<std::size_t>(points_.cols()) != labels_.size())
    throw DataError("dataset has " + std::to_string(points_.cols()) + " samples but " +
                    std::to_string(labels_.size()) + " labels");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int y = labels_[i];
    if (y != 0 && y != 1)
      throw DataError("row " + std::to_string(i) + ": label " + std::to_string(y) +
                      " is not 0 or 1");
    by_class_[static_cast<std::size_t>(y)].push_back(i);
  }
  if (by_class_[0].empty() || by_class_[1].empty())
    throw DataError("dataset needs at least one sample of each class");
  if (!points_.allFinite()) {
    for (Eigen::Index j = 0; j < points_.cols(); ++j)
      for (Eigen::Index r = 0; r < points_.rows(); ++r)
        if (!std::isfinite(points_(r, j)))
          throw DataError("row " + std::to_string(j) + ", feature " + std::to_string(r) +
                          ": non-finite value");
  }
}

const std::vector<std::size_t>& LabeledDataset::class_indices(int label) const {
  if (label != 0 && label != 1) throw UsageError("class label must be 0 or 1");
  return by_class_[static_cast<std::size_t>(label)];
}

LabeledDataset LabeledDataset::minmax_scaled() const {
  Eigen::MatrixXd scaled = points_;
  for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
    const double lo = scaled.row(r).minCoeff();
    const double range = scaled.row(r).maxCoeff() - lo;
    if (range > 0.0)
      scaled.row(r) = (scaled.row(r).array() - lo) / range;
    else
      scaled.row(r).setZero();
  }
  return LabeledDataset(std::move(scaled), labels_);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_real(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || end != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return value;
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file '" + path.string() + "'");

  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (lines.empty() && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw DataError("dataset file '" + path.string() + "' is empty");

  const auto first = split_cells(lines.front());
  const bool has_header = std::any_of(first.begin(), first.end(),
                                      [](std::string_view c) { return !parse_real(c); });
  const std::size_t columns = first.size();
  if (columns < 2) throw DataError("dataset needs at least one feature and one label column");

  std::size_t label_index = columns - 1;
  if (const auto* name = std::get_if<std::string>(&label_column)) {
    if (has_header) {
      const auto it = std::find(first.begin(), first.end(), std::string_view(*name));
      if (it == first.end())
        throw DataError("label column '" + *name + "' not found in header");
      label_index = static_cast<std::size_t>(it - first.begin());
    }
  } else {
    label_index = std::get<std::size_t>(label_column);
    if (label_index >= columns)
      throw DataError("label column index " + std::to_string(label_index) +
                      " out of range for " + std::to_string(columns) + " columns");
  }

  const std::size_t body_start = has_header ? 1 : 0;
  const std::size_t rows = lines.size() - body_start;
  if (rows == 0) throw DataError("dataset file '" + path.string() + "' has no data rows");

  Eigen::MatrixXd points(static_cast<Eigen::Index>(columns - 1), static_cast<Eigen::Index>(rows));
  std::vector<int> labels(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t line_no = r + body_start + 1;
    const auto cells = split_cells(lines[r + body_start]);
    if (cells.size() != columns)
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(columns) + " cells, found " + std::to_string(cells.size()));
    Eigen::Index feature = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      const auto value = parse_real(cells[c]);
      if (!value || !std::isfinite(*value))
        throw DataError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                        ": cannot parse '" + std::string(cells[c]) + "' as a finite number");
      if (c == label_index) {
        if (*value != 0.0 && *value != 1.0)
          throw DataError("line " + std::to_string(line_no) + ": label '" +
                          std::string(cells[c]) + "' is not 0 or 1");
        labels[r] = static_cast<int>(*value);
      } else {
        points(feature++, static_cast<Eigen::Index>(r)) = *value;
      }
    }
  }
  return LabeledDataset(std::move(points), std::move(labels));
}

void save_csv(const LabeledDataset& dataset, const std::filesystem::path& path) {
  std::ostringstream out;
  for (std::size_t f = 0; f < dataset.dimension(); ++f) out << 'f' << f << ',';
  out << "label\n";
  char buffer[64];
  for (std::size_t i = 0; i < dataset.count(); ++i) {
    const auto p = dataset.point(i);
    for (Eigen::Index f = 0; f < p.size(); ++f) {
      const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, p(f));
      out.write(buffer, end - buffer);
      out << ',';
    }
    out << dataset.label(i) << '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write dataset file '" + path.string() + "'");
  file << out.str();
  if (!file) throw DataError("failed writing dataset file '" + path.string() + "'");
}

LabeledDataset make_blobs(const BlobsConfig& config) {
  if (config.per_class < 1) throw UsageError("per_class must be at least 1");
  if (config.dimension < 1) throw UsageError("dimension must be at least 1");
  if (!(config.spread > 0.0)) throw UsageError("spread must be positive");
  if (!(config.center_distance > 0.0)) throw UsageError("center_distance must be positive");

  const auto n = static_cast<Eigen::Index>(config.dimension);
  const auto per = static_cast<Eigen::Index>(config.per_class);
  Eigen::MatrixXd points(n, 2 * per);
  std::vector<int> labels(static_cast<std::size_t>(2 * per));

  auto engine = random::stream(config.seed, random::Stream::blobs);
  std::normal_distribution<double> noise(0.0, config.spread);
  for (Eigen::Index j = 0; j < 2 * per; ++j) {
    const int y = j < per ? 0 : 1;
    labels[static_cast<std::size_t>(j)] = y;
    for (Eigen::Index r = 0; r < n; ++r) points(r, j) = noise(engine);
    points(0, j) += (y == 0 ? -0.5 : 0.5) * config.center_distance;
  }
  return LabeledDataset(std::move(points), std::move(labels));
}

std::vector<std::size_t> k_nearest(const LabeledDataset& dataset,
                                   const Eigen::Ref<const Eigen::VectorXd>& query,
                                   int class_filter, std::size_t k) {
  if (k < 1) throw UsageError("k must be at least 1");
  if (static_cast<std::size_t>(query.size()) != dataset.dimension())
    throw DataError("query dimension " + std::to_string(query.size()) +
                    " does not match dataset dimension " + std::to_string(dataset.dimension()));
  const auto& candidates = dataset.class_indices(class_filter);
  if (k > candidates.size())
    throw DataError("k = " + std::to_string(k) + " exceeds the " +
                    std::to_string(candidates.size()) + " samples of class " +
                    std::to_string(class_filter));

  std::vector<std::pair<double, std::size_t>> ranked(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const std::size_t row = candidates[c];
    ranked[c] = {(dataset.point(row) - query).squaredNorm(), row};
  }
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());

  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = ranked[i].second;
  return out;
}

ClassPair sample_pair(const LabeledDataset& dataset, std::uint64_t seed, std::size_t i) {
  const auto& zeros = dataset.class_indices(0);
  const auto& ones = dataset.class_indices(1);
  auto engine = random::stream(seed, random::Stream::pairs, i);
  std::uniform_int_distribution<std::size_t> pick_a(0, zeros.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_b(0, ones.size() - 1);

  // Redraw the rare pair whose members coincide as vectors; it has no segment.
  constexpr int kAttempts = 64;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const ClassPair pair{zeros[pick_a(engine)], ones[pick_b(engine)]};
    if (dataset.point(pair.index_a) != dataset.point(pair.index_b)) return pair;
  }
  throw DataError("could not draw a cross-class pair with distinct feature vectors");
}

std::vector<ClassPair> sample_pairs(const LabeledDataset& dataset, std::size_t reps,
                                    std::uint64_t seed) {
  if (reps < 1) throw UsageError("reps must be at least 1");
  std::vector<ClassPair> pairs;
  pairs.reserve(reps);
  for (std::size_t i = 0; i < reps; ++i) pairs.push_back(sample_pair(dataset, seed, i));
  return pairs;
}

}  // namespace dbc
