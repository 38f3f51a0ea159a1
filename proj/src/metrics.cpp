#include "bjme/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace bjme {

QMatrix q_from_loadings(const RowMatrix& a_hat, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("threshold must be >= 0");
  QMatrix q;
  q.entries = (a_hat.array().abs() > threshold).cast<int>().matrix();
  return q;
}

SelectionReport selection_metrics(const QMatrix& q_hat, const QMatrix& q_star) {
  if (q_hat.entries.rows() != q_star.entries.rows() || q_hat.entries.cols() != q_star.entries.cols())
    throw std::invalid_argument("selection_metrics: shape mismatch");
  Index zeros = 0, ones = 0, false_pos = 0, false_neg = 0;
  for (Index j = 0; j < q_star.entries.rows(); ++j) {
    for (Index k = 0; k < q_star.entries.cols(); ++k) {
      const bool truth = q_star.entries(j, k) != 0;
      const bool est = q_hat.entries(j, k) != 0;
      if (truth) {
        ++ones;
        if (!est) ++false_neg;
      } else {
        ++zeros;
        if (est) ++false_pos;
      }
    }
  }
  if (zeros == 0) throw std::invalid_argument("FPR undefined: Q* has no zero entries");
  if (ones == 0) throw std::invalid_argument("FNR undefined: Q* has no nonzero entries");
  SelectionReport r;
  r.msr = static_cast<double>(false_pos + false_neg) / static_cast<double>(zeros + ones);
  r.fpr = static_cast<double>(false_pos) / static_cast<double>(zeros);
  r.fnr = static_cast<double>(false_neg) / static_cast<double>(ones);
  return r;
}

RecoveryReport recovery_metrics(const ModelState& state_hat, const ModelState& state_star,
                                const QMatrix& q_star) {
  const Index J = state_star.n_items();
  const Index K = state_star.n_factors();
  if (state_hat.n_items() != J || state_hat.n_factors() != K || q_star.entries.rows() != J ||
      q_star.entries.cols() != K || state_hat.intercepts.size() != state_star.intercepts.size())
    throw std::invalid_argument("recovery_metrics: shape mismatch");

  RecoveryReport r;
  double sq_a = 0.0, rel_a = 0.0;
  Index n_a = 0, n_rel_a = 0;
  for (Index j = 0; j < J; ++j) {
    for (Index k = 0; k < K; ++k) {
      if (q_star.entries(j, k) == 0) continue;
      const double truth = state_star.loadings(j, k);
      const double diff = state_hat.loadings(j, k) - truth;
      sq_a += diff * diff;
      ++n_a;
      if (std::abs(truth) < kRelBiasGuard) {
        ++r.excluded_a;
        continue;
      }
      rel_a += diff / truth;
      ++n_rel_a;
    }
  }
  r.error_a = n_a ? std::sqrt(sq_a / static_cast<double>(n_a)) : 0.0;
  r.relbias_a = n_rel_a ? rel_a / static_cast<double>(n_rel_a) : 0.0;

  double sq_d = 0.0, rel_d = 0.0;
  Index n_rel_items = 0;
  for (Index j = 0; j < J; ++j) {
    const Vector& dh = state_hat.intercepts[j];
    const Vector& ds = state_star.intercepts[j];
    if (dh.size() != ds.size()) throw std::invalid_argument("recovery_metrics: intercept length mismatch");
    const double m = static_cast<double>(ds.size());
    sq_d += (dh - ds).squaredNorm() / m;
    double item_rel = 0.0;
    Index item_n = 0;
    for (Index c = 0; c < ds.size(); ++c) {
      if (std::abs(ds(c)) < kRelBiasGuard) {
        ++r.excluded_d;
        continue;
      }
      item_rel += (dh(c) - ds(c)) / ds(c);
      ++item_n;
    }
    if (item_n) {
      rel_d += item_rel / static_cast<double>(item_n);
      ++n_rel_items;
    }
  }
  r.error_d = std::sqrt(sq_d / static_cast<double>(J));
  r.relbias_d = n_rel_items ? rel_d / static_cast<double>(n_rel_items) : 0.0;
  return r;
}

}  // namespace bjme
