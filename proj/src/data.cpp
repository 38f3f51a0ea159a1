#include "bjme/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bjme/rng.hpp"

namespace bjme {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// Non-empty, non-comment lines split into fields.
std::vector<std::vector<std::string>> tokenize(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    rows.push_back(split_fields(t));
  }
  return rows;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_int(const std::string& s, long& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool row_is_header(const std::vector<std::string>& row, const std::string& missing_token) {
  for (const auto& f : row) {
    if (f.empty() || f == missing_token || f == "NA") continue;
    double v;
    if (!parse_double(f, v)) return true;
  }
  return false;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_for_write(const std::string& path, const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const auto& c : comments) out << "# " << c << '\n';
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Index ResponseData::n_observed() const {
  return mask.cast<Index>().sum();
}

void ResponseData::validate() const {
  if (responses.rows() < 1 || responses.cols() < 1)
    throw std::invalid_argument("response matrix must be non-empty");
  if (mask.rows() != responses.rows() || mask.cols() != responses.cols())
    throw std::invalid_argument("mask and responses differ in shape");
  if (static_cast<Index>(categories.size()) != responses.cols())
    throw std::invalid_argument("one category count per item required");
  for (Index j = 0; j < n_items(); ++j) {
    const int c = categories[j];
    if (c < 2) throw std::invalid_argument("item " + std::to_string(j) + " has fewer than 2 categories");
    for (Index i = 0; i < n_respondents(); ++i) {
      if (!observed(i, j)) continue;
      const int y = responses(i, j);
      if (y < 0 || y >= c)
        throw std::invalid_argument("response out of range at (" + std::to_string(i) + "," +
                                    std::to_string(j) + ")");
    }
  }
}

ResponseData ResponseData::select_rows(const std::vector<Index>& rows) const {
  ResponseData out;
  out.responses.resize(static_cast<Index>(rows.size()), n_items());
  out.mask.resize(static_cast<Index>(rows.size()), n_items());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.responses.row(r) = responses.row(rows[r]);
    out.mask.row(r) = mask.row(rows[r]);
  }
  out.categories = categories;
  return out;
}

ResponseData ResponseData::with_mask(MaskMatrix new_mask) const {
  if (new_mask.rows() != mask.rows() || new_mask.cols() != mask.cols())
    throw std::invalid_argument("mask shape mismatch");
  ResponseData out = *this;
  out.mask = std::move(new_mask);
  for (Index i = 0; i < out.responses.rows(); ++i)
    for (Index j = 0; j < out.responses.cols(); ++j)
      if (!out.mask(i, j)) out.responses(i, j) = 0;
  return out;
}

Index QMatrix::count_ones() const { return entries.cast<Index>().sum(); }

void QMatrix::validate() const {
  for (Index j = 0; j < entries.rows(); ++j)
    for (Index k = 0; k < entries.cols(); ++k)
      if (entries(j, k) != 0 && entries(j, k) != 1)
        throw std::invalid_argument("Q-matrix entries must be 0 or 1");
}

ResponseData parse_responses(const std::string& text, const LoadOptions& opts) {
  auto rows = tokenize(text);
  if (!rows.empty() && row_is_header(rows.front(), opts.missing_token)) rows.erase(rows.begin());
  if (rows.empty()) throw std::invalid_argument("response table is empty");
  const std::size_t n_cols = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != n_cols)
      throw std::invalid_argument("non-rectangular response table at data row " + std::to_string(r + 1));

  ResponseData data;
  const auto n = static_cast<Index>(rows.size());
  const auto J = static_cast<Index>(n_cols);
  data.responses = IntMatrix::Zero(n, J);
  data.mask = MaskMatrix::Zero(n, J);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < J; ++j) {
      const auto& f = rows[i][j];
      if (f.empty() || f == opts.missing_token) continue;
      long v;
      if (!parse_int(f, v))
        throw std::invalid_argument("non-integer response '" + f + "' at data row " + std::to_string(i + 1));
      if (v < 0)
        throw std::invalid_argument("negative response at data row " + std::to_string(i + 1));
      data.responses(i, j) = static_cast<int>(v);
      data.mask(i, j) = 1;
    }
  }

  data.categories.resize(J);
  for (Index j = 0; j < J; ++j) {
    if (data.mask.col(j).cast<int>().sum() == 0)
      throw std::invalid_argument("item " + std::to_string(j) + " has no observed responses");
    int max_y = 0;
    for (Index i = 0; i < n; ++i)
      if (data.mask(i, j)) max_y = std::max(max_y, data.responses(i, j));
    data.categories[j] = std::max(max_y + 1, 2);
  }
  if (opts.categories) {
    if (static_cast<Index>(opts.categories->size()) != J)
      throw std::invalid_argument("category override length does not match item count");
    data.categories = *opts.categories;
  }
  data.validate();
  return data;
}

ResponseData load_responses(const std::string& path, const LoadOptions& opts) {
  return parse_responses(read_file(path), opts);
}

void write_responses(const std::string& path, const ResponseData& data,
                     const std::vector<std::string>& comments) {
  auto out = open_for_write(path, comments);
  for (Index i = 0; i < data.n_respondents(); ++i) {
    for (Index j = 0; j < data.n_items(); ++j) {
      if (j) out << ',';
      if (data.observed(i, j)) out << data.responses(i, j);
      else out << "NA";
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

RowSplit split_rows(const ResponseData& data, double train_fraction, std::uint64_t seed) {
  const Index n = data.n_respondents();
  if (n < 2) throw std::invalid_argument("split_rows needs at least 2 respondents");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  auto rng = make_stream(seed, streams::kSplit);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_first = static_cast<Index>(std::llround(train_fraction * static_cast<double>(n)));
  n_first = std::clamp<Index>(n_first, 1, n - 1);

  RowSplit split;
  split.first_rows.assign(order.begin(), order.begin() + n_first);
  split.second_rows.assign(order.begin() + n_first, order.end());
  std::sort(split.first_rows.begin(), split.first_rows.end());
  std::sort(split.second_rows.begin(), split.second_rows.end());
  split.first = data.select_rows(split.first_rows);
  split.second = data.select_rows(split.second_rows);
  return split;
}

void write_matrix(const std::string& path, const Matrix& m, const std::vector<std::string>& comments) {
  if (!m.allFinite()) throw std::invalid_argument("refusing to write non-finite matrix: " + path);
  auto out = open_for_write(path, comments);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix parse_matrix(const std::string& text) {
  auto rows = tokenize(text);
  if (!rows.empty() && row_is_header(rows.front(), "NA")) rows.erase(rows.begin());
  if (rows.empty()) return Matrix(0, 0);
  const std::size_t n_cols = rows.front().size();
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(n_cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != n_cols)
      throw std::invalid_argument("non-rectangular matrix at row " + std::to_string(r + 1));
    for (std::size_t c = 0; c < n_cols; ++c) {
      double v;
      if (!parse_double(rows[r][c], v))
        throw std::invalid_argument("malformed value '" + rows[r][c] + "' at row " + std::to_string(r + 1));
      m(static_cast<Index>(r), static_cast<Index>(c)) = v;
    }
  }
  return m;
}

Matrix read_matrix(const std::string& path) { return parse_matrix(read_file(path)); }

void write_intercepts(const std::string& path, const std::vector<Vector>& intercepts,
                      const std::vector<std::string>& comments) {
  Index width = 0;
  for (const auto& d : intercepts) width = std::max(width, d.size());
  auto out = open_for_write(path, comments);
  for (const auto& d : intercepts) {
    for (Index c = 0; c < width; ++c) {
      if (c) out << ',';
      if (c < d.size()) out << format_double(d(c));
      else out << "NA";
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<Vector> read_intercepts(const std::string& path) {
  auto rows = tokenize(read_file(path));
  if (!rows.empty() && row_is_header(rows.front(), "NA")) rows.erase(rows.begin());
  std::vector<Vector> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<double> vals;
    bool padding = false;
    for (const auto& f : rows[r]) {
      if (f == "NA" || f.empty()) {
        padding = true;
        continue;
      }
      double v;
      if (padding || !parse_double(f, v))
        throw std::invalid_argument("malformed intercept row " + std::to_string(r + 1));
      vals.push_back(v);
    }
    if (vals.empty()) throw std::invalid_argument("empty intercept row " + std::to_string(r + 1));
    out.push_back(Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size())));
  }
  return out;
}

void write_qmatrix(const std::string& path, const QMatrix& q, const std::vector<std::string>& comments) {
  auto out = open_for_write(path, comments);
  for (Index j = 0; j < q.entries.rows(); ++j) {
    for (Index k = 0; k < q.entries.cols(); ++k) {
      if (k) out << ',';
      out << q.entries(j, k);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

QMatrix read_qmatrix(const std::string& path) {
  const Matrix m = read_matrix(path);
  QMatrix q;
  q.entries = m.array().round().cast<int>().matrix();
  if (!(q.entries.cast<double>() - m).isZero(0.0))
    throw std::invalid_argument("Q-matrix must contain integers: " + path);
  q.validate();
  return q;
}

}  // namespace bjme
