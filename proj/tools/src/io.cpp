#include "io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "dbc/error.hpp"

namespace dbc::cli {

namespace {

std::string digest_hex(const unsigned char* data, std::size_t size) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int length = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data, size) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &length) != 1)
    throw DataError("sha256 failed");
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < length; ++i) out << std::setw(2) << static_cast<int>(md[i]);
  return out.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw DataError(where + ": cannot parse '" + text + "' as a number");
  return value;
}

}  // namespace

std::string sha256_text(const std::string& text) {
  return digest_hex(reinterpret_cast<const unsigned char*>(text.data()), text.size());
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_text(read_text(path)); }

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

double parse_real(const std::string& text, const std::string& what) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return parse_number<double>(text, what);
    const double num = parse_number<double>(text.substr(0, slash), what);
    const double den = parse_number<double>(text.substr(slash + 1), what);
    if (den == 0.0) throw UsageError(what + ": zero denominator in '" + text + "'");
    return num / den;
  } catch (const DataError&) {
    throw UsageError(what + ": expected a number or a ratio like 1/256, got '" + text + "'");
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out.flush()) throw DataError("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path sidecar(const std::filesystem::path& path, const std::string& suffix) {
  return std::filesystem::path(path.string() + suffix);
}

std::optional<std::string> ScoreFile::get(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return std::nullopt;
}

std::string render_scores(const ScoreFile& file) {
  std::string out = std::string("# ") + kScoresFormat + "\n";
  for (const auto& [key, value] : file.meta) out += "# " + key + "=" + value + "\n";
  out += "pair_index,k,m,dbc,divisor_mode,centered\n";
  for (const auto& r : file.rows) {
    out += std::to_string(r.pair_index) + "," + std::to_string(r.k) + "," + std::to_string(r.m) +
           "," + format_double(r.dbc) + "," + r.divisor_mode + "," + (r.centered ? "true" : "false") +
           "\n";
  }
  return out;
}

ScoreFile parse_scores(const std::string& text, const std::string& origin) {
  ScoreFile file;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_format = false;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      if (body == kScoresFormat) {
        saw_format = true;
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      file.meta.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      continue;
    }
    if (!saw_header) {
      if (line != "pair_index,k,m,dbc,divisor_mode,centered")
        throw DataError(where + ": unexpected score header '" + line + "'");
      saw_header = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 6)
      throw DataError(where + ": expected 6 columns, found " + std::to_string(cells.size()));
    ScoreRow row;
    row.pair_index = parse_number<long long>(cells[0], where);
    row.k = parse_number<std::size_t>(cells[1], where);
    row.m = parse_number<std::size_t>(cells[2], where);
    row.dbc = parse_number<double>(cells[3], where);
    row.divisor_mode = cells[4];
    if (cells[5] != "true" && cells[5] != "false")
      throw DataError(where + ": centered must be true or false");
    row.centered = cells[5] == "true";
    file.rows.push_back(row);
  }
  if (!saw_format) throw DataError(origin + ": missing '# " + kScoresFormat + "' line");
  if (!saw_header) throw DataError(origin + ": no score table");
  return file;
}

ScoreFile load_scores(const std::filesystem::path& path) {
  return parse_scores(read_text(path), path.string());
}

void save_adversarial_set(const AdversarialSet& set, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t r = 0; r < set.dimension(); ++r) out += (r ? ",x" : "x") + std::to_string(r);
  out += "\n";
  for (std::size_t j = 0; j < set.size(); ++j) {
    for (std::size_t r = 0; r < set.dimension(); ++r) {
      if (r) out += ",";
      out += format_double(set.points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
    }
    out += "\n";
  }
  write_text(path, out);

  std::string prov = "example,kind,pair_index,index_a,index_b,lambda,f\n";
  for (std::size_t j = 0; j < set.provenance.size(); ++j) {
    const auto& p = set.provenance[j];
    prov += std::to_string(j) + "," + to_string(set.kind) + "," + std::to_string(p.pair_index) + "," +
            std::to_string(p.index_a) + "," + std::to_string(p.index_b) + "," +
            format_double(p.lambda) + "," + format_double(p.value) + "\n";
  }
  for (const auto& f : set.failures)
    prov += "failed," + to_string(set.kind) + "," + std::to_string(f.pair_index) + "," +
            std::to_string(f.index_a) + "," + std::to_string(f.index_b) + ",," + "\n";
  write_text(sidecar(path, ".provenance.csv"), prov);
}

Eigen::MatrixXd load_adversarial_points(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line_no == 1 && !line.empty() && line[0] == 'x') continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) row.push_back(parse_number<double>(trim(cell), where));
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError(where + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path.string() + ": no examples");
  Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.front().size()),
                         static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t r = 0; r < rows[j].size(); ++r)
      points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = rows[j][r];
  return points;
}

}  // namespace dbc::cli
