#pragma once

#include <vector>

#include "bjme/model.hpp"

namespace bjme {

// Signed column permutation. Aligned column k is
// signs[k] * (source column permutation[k]).
struct Alignment {
  std::vector<Index> permutation;
  std::vector<int> signs;

  static Alignment identity(Index k);
  Index size() const { return static_cast<Index>(permutation.size()); }
  bool is_valid() const;
  Alignment inverse() const;
};

// Applies the alignment to the columns of a J x K (or N x K) matrix.
RowMatrix apply_columns(const RowMatrix& m, const Alignment& al);

// Sum over rows of squared distances between aligned a_hat and reference.
double alignment_cost(const RowMatrix& a_hat, const RowMatrix& a_ref, const Alignment& al);

// Signed permutation minimizing alignment_cost: best sign per column pair,
// then a K x K linear assignment.
Alignment best_alignment(const RowMatrix& a_hat, const RowMatrix& a_ref);

// Enumerates all K! 2^K signed permutations. Test oracle; K stays small.
Alignment best_alignment_exhaustive(const RowMatrix& a_hat, const RowMatrix& a_ref);

// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
// Returns assignment[row] = column.
std::vector<Index> solve_assignment(const Matrix& cost);

// Permutes and sign-flips the columns of theta and loadings identically.
ModelState apply_alignment(const ModelState& state, const Alignment& al);

}  // namespace bjme
