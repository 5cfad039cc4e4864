#include "dpplab/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace dpp {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(errc::io_error, "cannot open " + path + " for writing");
  out << text;
  if (!out) raise(errc::io_error, "short write to " + path);
}

namespace {

double parse_double(const std::string& tok, const std::string& path, long line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || (end && *end != '\0'))
    raise(errc::io_error, path + ":" + std::to_string(line) + ": bad number '" + tok + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(line);
  while (std::getline(is, tok, ',')) {
    // trim surrounding spaces
    const auto a = tok.find_first_not_of(" \t\r");
    const auto b = tok.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? std::string() : tok.substr(a, b - a + 1));
  }
  return out;
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    for (const auto& tok : split_csv_line(line)) row.push_back(parse_double(tok, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size())
      raise(errc::io_error, path + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) raise(errc::io_error, path + ": empty matrix file");
  if (rows.size() != rows.front().size())
    raise(errc::io_error, path + ": matrix is not square (" + std::to_string(rows.size()) +
                              " rows, " + std::to_string(rows.front().size()) + " columns)");
  Matrix M(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

void write_matrix_csv(const Matrix& M, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot open " + path + " for writing");
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
  if (!out) raise(errc::io_error, "short write to " + path);
}

Matrix read_matrix_json(const std::string& path) {
  try {
    const auto j = nlohmann::json::parse(read_text_file(path));
    const int d = j.at("d").get<int>();
    const auto entries = j.at("entries").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(entries.size()) != d)
      raise(errc::io_error, path + ": 'entries' row count differs from 'd'");
    Matrix M(d, d);
    for (int i = 0; i < d; ++i) {
      if (static_cast<int>(entries[i].size()) != d)
        raise(errc::io_error, path + ": ragged 'entries' row " + std::to_string(i));
      for (int jx = 0; jx < d; ++jx) M(i, jx) = entries[i][jx];
    }
    return M;
  } catch (const nlohmann::json::exception& e) {
    raise(errc::io_error, path + ": bad matrix JSON: " + e.what());
  }
}

void write_matrix_json(const Matrix& M, const std::string& path) {
  nlohmann::json j;
  j["d"] = static_cast<int>(M.rows());
  std::vector<std::vector<double>> entries(static_cast<std::size_t>(M.rows()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index jx = 0; jx < M.cols(); ++jx) entries[i].push_back(M(i, jx));
  j["entries"] = entries;
  write_text_file(path, j.dump());
}

Matrix read_matrix_auto(const std::string& path) {
  return ends_with(path, ".json") ? read_matrix_json(path) : read_matrix_csv(path);
}

// ---------------------------------------------------------------------------
// Sample files

SampleMatrix read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open " + path);
  SampleMatrix X;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto toks = split_csv_line(line);
    if (lineno == 1 && !toks.empty() && toks[0] == "x1") continue;  // optional header
    if (X.d == 0) X.d = static_cast<int>(toks.size());
    if (static_cast<int>(toks.size()) != X.d)
      raise(errc::io_error, path + ":" + std::to_string(lineno) + ": ragged row");
    for (const auto& t : toks) {
      if (t == "0")
        X.data.push_back(0);
      else if (t == "1")
        X.data.push_back(1);
      else
        raise(errc::io_error,
              path + ":" + std::to_string(lineno) + ": entry '" + t + "' is not 0 or 1");
    }
  }
  if (X.d == 0 || X.rows() < 1) raise(errc::io_error, path + ": no observations");
  return X;
}

void write_samples_csv(const SampleMatrix& X, const std::string& path, bool header) {
  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot open " + path + " for writing");
  if (header) {
    for (int i = 1; i <= X.d; ++i) out << (i > 1 ? "," : "") << 'x' << i;
    out << '\n';
  }
  const long T = X.rows();
  std::string row(static_cast<std::size_t>(2 * X.d), ',');
  for (long t = 0; t < T; ++t) {
    for (int i = 0; i < X.d; ++i) {
      row[static_cast<std::size_t>(2 * i)] = static_cast<char>('0' + X.data[t * X.d + i]);
      if (i + 1 < X.d) row[static_cast<std::size_t>(2 * i + 1)] = ',';
    }
    row[static_cast<std::size_t>(2 * X.d - 1)] = '\n';
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) raise(errc::io_error, "short write to " + path);
}

namespace {
constexpr char kSampleMagic[4] = {'D', 'P', 'P', 'S'};
constexpr std::uint32_t kSampleVersion = 1;
}  // namespace

void write_samples_bin(const SampleMatrix& X, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(errc::io_error, "cannot open " + path + " for writing");
  const std::uint32_t version = kSampleVersion;
  const std::uint32_t T = static_cast<std::uint32_t>(X.rows());
  const std::uint32_t d = static_cast<std::uint32_t>(X.d);
  out.write(kSampleMagic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&T), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  const int row_bytes = (X.d + 7) / 8;
  std::vector<char> row(static_cast<std::size_t>(row_bytes));
  for (long t = 0; t < X.rows(); ++t) {
    std::fill(row.begin(), row.end(), 0);
    for (int i = 0; i < X.d; ++i)
      if (X.data[t * X.d + i]) row[static_cast<std::size_t>(i / 8)] |= static_cast<char>(1 << (i % 8));
    out.write(row.data(), row_bytes);
  }
  if (!out) raise(errc::io_error, "short write to " + path);
}

SampleMatrix read_samples_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, T = 0, d = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&T), 4);
  in.read(reinterpret_cast<char*>(&d), 4);
  if (!in || std::memcmp(magic, kSampleMagic, 4) != 0)
    raise(errc::io_error, path + ": not a sample file (bad magic)");
  if (version != kSampleVersion)
    raise(errc::io_error, path + ": unsupported version " + std::to_string(version));
  if (T < 1 || d < 1) raise(errc::io_error, path + ": empty sample");
  SampleMatrix X;
  X.d = static_cast<int>(d);
  X.data.resize(static_cast<std::size_t>(T) * d);
  const int row_bytes = (X.d + 7) / 8;
  std::vector<char> row(static_cast<std::size_t>(row_bytes));
  for (std::uint32_t t = 0; t < T; ++t) {
    in.read(row.data(), row_bytes);
    if (!in) raise(errc::io_error, path + ": truncated at row " + std::to_string(t));
    for (std::uint32_t i = 0; i < d; ++i)
      X.data[static_cast<std::size_t>(t) * d + i] =
          (row[i / 8] >> (i % 8)) & 1 ? 1 : 0;
  }
  return X;
}

SampleMatrix read_samples_auto(const std::string& path) {
  return ends_with(path, ".bin") ? read_samples_bin(path) : read_samples_csv(path);
}

}  // namespace dpp
