#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "balkit/iofmt.hpp"

namespace balkit {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void fail(const std::string& name, std::size_t line, const std::string& what) {
  throw ParseError(name + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& tok, const std::string& name, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(name, line, "cannot parse number '" + tok + "'");
  return v;
}

long parse_index(const std::string& tok, const std::string& name, std::size_t line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) fail(name, line, "cannot parse integer '" + tok + "'");
  return v;
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

}  // namespace

MatrixMarketData read_matrix_market(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) fail(name, 1, "empty file");
  ++lineno;
  const auto head = tokens(lower(line));
  if (head.size() < 5 || head[0] != "%%matrixmarket" || head[1] != "matrix") {
    fail(name, lineno, "missing '%%MatrixMarket matrix' banner");
  }
  const std::string& format = head[2];
  const std::string& field = head[3];
  const std::string& symmetry = head[4];
  if (format != "coordinate" && format != "array") fail(name, lineno, "unsupported format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double" && field != "pattern") {
    fail(name, lineno, "unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") fail(name, lineno, "unsupported symmetry '" + symmetry + "'");
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";
  if (pattern && format == "array") fail(name, lineno, "pattern field requires coordinate format");

  // size line
  std::vector<std::string> size_tok;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = tokens(line);
    if (t.empty() || t[0][0] == '%') continue;
    size_tok = t;
    break;
  }
  if (size_tok.empty()) fail(name, lineno, "missing size line");

  MatrixMarketData out;
  if (format == "coordinate") {
    if (size_tok.size() != 3) fail(name, lineno, "coordinate size line needs rows cols nnz");
    const long rows = parse_index(size_tok[0], name, lineno);
    const long cols = parse_index(size_tok[1], name, lineno);
    const long nnz = parse_index(size_tok[2], name, lineno);
    if (rows < 0 || cols < 0 || nnz < 0) fail(name, lineno, "negative size");
    if (symmetric && rows != cols) fail(name, lineno, "symmetric matrix must be square");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
    long seen = 0;
    while (seen < nnz && std::getline(in, line)) {
      ++lineno;
      const auto t = tokens(line);
      if (t.empty() || t[0][0] == '%') continue;
      if (t.size() != (pattern ? 2u : 3u)) fail(name, lineno, "wrong number of fields in entry");
      const long i = parse_index(t[0], name, lineno);
      const long j = parse_index(t[1], name, lineno);
      if (i < 1 || i > rows || j < 1 || j > cols) fail(name, lineno, "index out of range");
      const double v = pattern ? 1.0 : parse_number(t[2], name, lineno);
      trip.emplace_back(i - 1, j - 1, v);
      if (symmetric && i != j) trip.emplace_back(j - 1, i - 1, v);
      ++seen;
    }
    if (seen < nnz) fail(name, lineno, "expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
    out.coordinate = true;
    out.sparse.resize(rows, cols);
    out.sparse.setFromTriplets(trip.begin(), trip.end());
    out.sparse.makeCompressed();
    return out;
  }

  if (size_tok.size() != 2) fail(name, lineno, "array size line needs rows cols");
  const long rows = parse_index(size_tok[0], name, lineno);
  const long cols = parse_index(size_tok[1], name, lineno);
  if (rows < 0 || cols < 0) fail(name, lineno, "negative size");
  if (symmetric && rows != cols) fail(name, lineno, "symmetric matrix must be square");
  out.dense = MatrixXd::Zero(rows, cols);
  // Column-major; symmetric arrays list the lower triangle only.
  std::vector<std::pair<long, long>> slots;
  for (long j = 0; j < cols; ++j)
    for (long i = symmetric ? j : 0; i < rows; ++i) slots.emplace_back(i, j);
  std::size_t next = 0;
  while (next < slots.size() && std::getline(in, line)) {
    ++lineno;
    const auto t = tokens(line);
    if (t.empty() || t[0][0] == '%') continue;
    for (const auto& tok : t) {
      if (next >= slots.size()) fail(name, lineno, "too many values");
      const auto [i, j] = slots[next++];
      const double v = parse_number(tok, name, lineno);
      out.dense(i, j) = v;
      if (symmetric) out.dense(j, i) = v;
    }
  }
  if (next < slots.size()) {
    fail(name, lineno, "expected " + std::to_string(slots.size()) + " values, found " + std::to_string(next));
  }
  return out;
}

MatrixMarketData read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_matrix_market(in, path.string());
}

void write_matrix_market(std::ostream& out, const MatrixXd& m) {
  out << "%%MatrixMarket matrix array real general\n" << m.rows() << ' ' << m.cols() << '\n';
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out << format_double(m(i, j)) << '\n';
}

void write_matrix_market(std::ostream& out, const SparseMatrixXd& m) {
  out << "%%MatrixMarket matrix coordinate real general\n"
      << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrixXd::InnerIterator it(m, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value()) << '\n';
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

}  // namespace balkit
