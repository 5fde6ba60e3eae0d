#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dbc/boundary.hpp"
#include "dbc/spectrum.hpp"

namespace dbc::cli {

/// Hex SHA-256 of a file's bytes. Throws DataError if it cannot be read.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_text(const std::string& text);

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

/// Accepts decimals and rationals like "1/256".
double parse_real(const std::string& text, const std::string& what);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

inline constexpr const char* kScoresFormat = "dbc-scores/1";

struct ScoreRow {
  long long pair_index = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  double dbc = 0.0;
  std::string divisor_mode;
  bool centered = true;
};

/// Score batch file: `# key=value` metadata lines, then a CSV table.
struct ScoreFile {
  std::vector<std::pair<std::string, std::string>> meta;  // in file order
  std::vector<ScoreRow> rows;

  std::optional<std::string> get(const std::string& key) const;
};

std::string render_scores(const ScoreFile& file);
ScoreFile parse_scores(const std::string& text, const std::string& origin);
ScoreFile load_scores(const std::filesystem::path& path);

/// One example per row; the provenance sidecar goes to `<path>.provenance.csv`.
void save_adversarial_set(const AdversarialSet& set, const std::filesystem::path& path);
Eigen::MatrixXd load_adversarial_points(const std::filesystem::path& path);

std::filesystem::path sidecar(const std::filesystem::path& path, const std::string& suffix);

}  // namespace dbc::cli
