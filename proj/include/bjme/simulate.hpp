#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "bjme/cv.hpp"
#include "bjme/data.hpp"
#include "bjme/metrics.hpp"
#include "bjme/model.hpp"
#include "bjme/optimizer.hpp"
#include "bjme/rng.hpp"

namespace bjme {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Per-threshold uniform ranges for true intercepts. C = 4 gives
// (0.75, 1.5), (-0.375, 0.375), (-1.5, -0.75); C = 2 gives (-1.5, 1.5).
// Other C use equally spaced centers on [-1.125, 1.125], half-width <= 0.375.
std::vector<Range> default_intercept_ranges(int categories);

// One uniform draw per range, sorted into strictly decreasing order.
Vector draw_intercepts(const std::vector<Range>& ranges, Rng& rng);

struct SimDesign {
  Index n = 500;
  Index j = 30;
  Index k = 3;
  double rho = 0.1;
  int categories = 4;
  // Fractions of items loading on one, two and three factors.
  std::array<double, 3> q_proportions{0.6, 0.2, 0.2};
  Range loading_range{0.5, 2.0};
  std::vector<Range> intercept_ranges;  // empty: default_intercept_ranges(categories)
  std::uint64_t seed = 0;

  std::vector<Range> resolved_intercept_ranges() const;
  void validate() const;
};

// Exchangeable correlation rho * 11' + (1 - rho) I.
Matrix gen_sigma(Index k, double rho);

// Item counts per loading pattern, then factors dealt cyclically across
// columns; the order of pattern types over items is shuffled by seed.
QMatrix gen_q(const SimDesign& design);

struct Truth {
  ModelState state;
  QMatrix q;
  Matrix sigma;
};

Truth gen_true_params(const SimDesign& design);

// Independent categorical draws per cell; fully observed.
ResponseData sample_responses(const ModelState& truth, const std::vector<int>& categories,
                              std::uint64_t seed);

struct ReplicationOptions {
  FitConfig fit;
  CvConfig cv;
  // Skip tuning and fit the whole data set at this penalty.
  std::optional<double> fixed_lambda;
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  double lambda = 0.0;
  SelectionReport selection;
  RecoveryReport recovery;
  FitResult fit;
};

// Truth -> responses -> tune_and_fit (or fixed-lambda fit) -> alignment to
// truth -> metrics, all driven by design.seed.
ReplicationResult run_replication(const SimDesign& design, const ReplicationOptions& opts);

}  // namespace bjme
