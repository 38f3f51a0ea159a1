#include "bjme/align.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bjme {

Alignment Alignment::identity(Index k) {
  Alignment al;
  al.permutation.resize(static_cast<std::size_t>(k));
  std::iota(al.permutation.begin(), al.permutation.end(), Index{0});
  al.signs.assign(static_cast<std::size_t>(k), 1);
  return al;
}

bool Alignment::is_valid() const {
  if (permutation.size() != signs.size()) return false;
  std::vector<bool> seen(permutation.size(), false);
  for (Index p : permutation) {
    if (p < 0 || p >= size() || seen[static_cast<std::size_t>(p)]) return false;
    seen[static_cast<std::size_t>(p)] = true;
  }
  return std::all_of(signs.begin(), signs.end(), [](int s) { return s == 1 || s == -1; });
}

Alignment Alignment::inverse() const {
  Alignment inv;
  inv.permutation.resize(permutation.size());
  inv.signs.resize(signs.size());
  for (std::size_t k = 0; k < permutation.size(); ++k) {
    const auto src = static_cast<std::size_t>(permutation[k]);
    inv.permutation[src] = static_cast<Index>(k);
    inv.signs[src] = signs[k];
  }
  return inv;
}

RowMatrix apply_columns(const RowMatrix& m, const Alignment& al) {
  if (!al.is_valid() || al.size() != m.cols()) throw std::invalid_argument("invalid alignment");
  RowMatrix out(m.rows(), m.cols());
  for (Index k = 0; k < m.cols(); ++k)
    out.col(k) = static_cast<double>(al.signs[k]) * m.col(al.permutation[k]);
  return out;
}

double alignment_cost(const RowMatrix& a_hat, const RowMatrix& a_ref, const Alignment& al) {
  return (apply_columns(a_hat, al) - a_ref).squaredNorm();
}

std::vector<Index> solve_assignment(const Matrix& cost) {
  // Shortest augmenting path form of the Hungarian method with potentials,
  // 1-based internally.
  const Index n = cost.rows();
  if (cost.cols() != n) throw std::invalid_argument("assignment cost must be square");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);
  for (Index row = 1; row <= n; ++row) {
    match[0] = row;
    Index col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const Index r0 = match[col0];
      double delta = inf;
      Index col1 = 0;
      for (Index c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (Index c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const Index col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<Index> assignment(static_cast<std::size_t>(n));
  for (Index c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
  return assignment;
}

Alignment best_alignment(const RowMatrix& a_hat, const RowMatrix& a_ref) {
  if (a_hat.rows() != a_ref.rows() || a_hat.cols() != a_ref.cols())
    throw std::invalid_argument("best_alignment: shape mismatch");
  const Index K = a_ref.cols();
  // cost(k, s): reference column k matched with source column s.
  Matrix cost(K, K);
  Eigen::MatrixXi sign(K, K);
  for (Index k = 0; k < K; ++k) {
    for (Index s = 0; s < K; ++s) {
      const double plus = (a_hat.col(s) - a_ref.col(k)).squaredNorm();
      const double minus = (a_hat.col(s) + a_ref.col(k)).squaredNorm();
      sign(k, s) = minus < plus ? -1 : 1;
      cost(k, s) = std::min(plus, minus);
    }
  }
  const auto assignment = solve_assignment(cost);
  Alignment al;
  al.permutation = assignment;
  al.signs.resize(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) al.signs[k] = sign(k, assignment[k]);
  return al;
}

Alignment best_alignment_exhaustive(const RowMatrix& a_hat, const RowMatrix& a_ref) {
  if (a_hat.rows() != a_ref.rows() || a_hat.cols() != a_ref.cols())
    throw std::invalid_argument("best_alignment_exhaustive: shape mismatch");
  const Index K = a_ref.cols();
  Alignment cand = Alignment::identity(K);
  Alignment best = cand;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    for (unsigned mask = 0; mask < (1u << K); ++mask) {
      for (Index k = 0; k < K; ++k) cand.signs[k] = (mask >> k) & 1u ? -1 : 1;
      const double c = alignment_cost(a_hat, a_ref, cand);
      if (c < best_cost) {
        best_cost = c;
        best = cand;
      }
    }
  } while (std::next_permutation(cand.permutation.begin(), cand.permutation.end()));
  return best;
}

ModelState apply_alignment(const ModelState& state, const Alignment& al) {
  ModelState out;
  out.theta = apply_columns(state.theta, al);
  out.loadings = apply_columns(state.loadings, al);
  out.intercepts = state.intercepts;
  return out;
}

}  // namespace bjme
