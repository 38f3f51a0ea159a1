#pragma once

#include <string>
#include <vector>

#include "bjme/data.hpp"
#include "bjme/model.hpp"

namespace bjme {

struct SelectionReport {
  double msr = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
};

struct RecoveryReport {
  double error_a = 0.0;
  double error_d = 0.0;
  double relbias_a = 0.0;
  double relbias_d = 0.0;
  // Terms dropped from a relative bias because |true value| < kRelBiasGuard.
  Index excluded_a = 0;
  Index excluded_d = 0;
};

inline constexpr double kRelBiasGuard = 1e-12;

// q_jk = 1 when |a_jk| > threshold (strict).
QMatrix q_from_loadings(const RowMatrix& a_hat, double threshold);

// Throws std::invalid_argument on shape mismatch or when q_star has no zeros
// (FPR undefined) or no ones (FNR undefined).
SelectionReport selection_metrics(const QMatrix& q_hat, const QMatrix& q_star);

// state_hat must already be aligned to state_star. Loading metrics use only
// entries with q* = 1; intercept metrics use every item.
RecoveryReport recovery_metrics(const ModelState& state_hat, const ModelState& state_star,
                                const QMatrix& q_star);

}  // namespace bjme
