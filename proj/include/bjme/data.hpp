#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bjme/types.hpp"

namespace bjme {

// Item response matrix with its observation mask. Missing cells hold 0 in
// `responses` and 0 in `mask`.
struct ResponseData {
  IntMatrix responses;
  MaskMatrix mask;
  std::vector<int> categories;

  Index n_respondents() const { return responses.rows(); }
  Index n_items() const { return responses.cols(); }
  bool observed(Index i, Index j) const { return mask(i, j) != 0; }
  Index n_observed() const;

  // Throws std::invalid_argument when any invariant is violated.
  void validate() const;

  // Rows in the given order; categories are carried over unchanged.
  ResponseData select_rows(const std::vector<Index>& rows) const;
  ResponseData with_mask(MaskMatrix new_mask) const;
};

// J x K binary structure matrix.
struct QMatrix {
  IntMatrix entries;

  Index n_items() const { return entries.rows(); }
  Index n_factors() const { return entries.cols(); }
  Index count_ones() const;
  void validate() const;
};

struct LoadOptions {
  std::string missing_token = "NA";
  // Overrides the inferred per-item category counts when set.
  std::optional<std::vector<int>> categories;
};

ResponseData load_responses(const std::string& path, const LoadOptions& opts = {});
ResponseData parse_responses(const std::string& text, const LoadOptions& opts = {});
void write_responses(const std::string& path, const ResponseData& data,
                     const std::vector<std::string>& comments = {});

struct RowSplit {
  ResponseData first;
  ResponseData second;
  std::vector<Index> first_rows;
  std::vector<Index> second_rows;
};

// Random disjoint partition of respondents; the first part receives
// round(train_fraction * N) rows, clamped to [1, N - 1].
RowSplit split_rows(const ResponseData& data, double train_fraction, std::uint64_t seed);

// Plain comma-separated real matrices. Lines starting with '#' are comments;
// a non-numeric first row is treated as a header.
void write_matrix(const std::string& path, const Matrix& m,
                  const std::vector<std::string>& comments = {});
Matrix read_matrix(const std::string& path);
Matrix parse_matrix(const std::string& text);

// Ragged intercept rows; shorter rows are padded with NA on disk.
void write_intercepts(const std::string& path, const std::vector<Vector>& intercepts,
                      const std::vector<std::string>& comments = {});
std::vector<Vector> read_intercepts(const std::string& path);

void write_qmatrix(const std::string& path, const QMatrix& q,
                   const std::vector<std::string>& comments = {});
QMatrix read_qmatrix(const std::string& path);

}  // namespace bjme
