#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bjme/data.hpp"
#include "bjme/optimizer.hpp"

namespace bjme {

// Cell-level fold partition of the observed entries. fold_of(i, j) is the
// 0-based fold of an observed cell and -1 for a missing one.
struct FoldAssignment {
  int n_folds = 0;
  IntMatrix fold_of;

  MaskMatrix held_out_mask(int m) const;
  // Observed cells outside fold m.
  MaskMatrix training_mask(int m) const;
  Index fold_size(int m) const;
};

// Shuffles the observed cells and deals them round-robin, so fold sizes
// differ by at most one.
FoldAssignment make_folds(const MaskMatrix& mask, int n_folds, std::uint64_t seed);

// Strictly increasing positive penalty candidates.
struct LambdaGrid {
  std::vector<double> values;

  explicit LambdaGrid(std::vector<double> v);
  static LambdaGrid first_stage();
};

// Five linearly spaced values on [lambda_hat / 5, 5 lambda_hat].
LambdaGrid second_stage_grid(double lambda_hat);

struct CvConfig {
  int folds = 5;
  LambdaGrid stage1 = LambdaGrid::first_stage();
  double train_fraction = 0.5;
  // Each fold fit starts from the same fold's solution at the previous
  // (smaller) candidate.
  bool warm_start = true;
  int n_starts = 1;

  void validate() const;
};

// Sum of -log P(observed category) over the cells of fold m under `state`.
double held_out_error(const ResponseData& data, const FoldAssignment& folds, int m, const ModelState& state);

struct FoldFit {
  double error = 0.0;
  FitResult fit;
};

// Fits on the cells outside fold m and scores the held-out cells.
FoldFit cv_fold_fit(const ResponseData& data, const FoldAssignment& folds, int m, double lambda,
                    const Hyperparameters& hyper, const FitConfig& cfg, int n_starts = 1,
                    const std::optional<ModelState>& init = std::nullopt);
double cv_error(const ResponseData& data, const FoldAssignment& folds, int m, double lambda,
                const Hyperparameters& hyper, const FitConfig& cfg,
                const std::optional<ModelState>& init = std::nullopt);

struct CvRow {
  double lambda = 0.0;
  std::vector<double> fold_errors;
  double total = 0.0;
  bool selected = false;
};

struct CvStage {
  std::vector<CvRow> rows;
  double best_lambda = 0.0;
};

// Index of the smallest total; ties go to the larger lambda.
std::size_t argmin_lambda(const std::vector<CvRow>& rows);

struct CvReport {
  CvStage stage1;
  CvStage stage2;
  double lambda_hat = 0.0;
  int n_fits = 0;
};

// Two-stage M-fold missing-value cross-validation of the L1 penalty.
CvReport select_lambda(const ResponseData& train, const Hyperparameters& hyper, const FitConfig& cfg,
                       const CvConfig& cv);

struct TuneResult {
  FitResult fit;  // on the second (estimation) part of the row split
  double lambda_hat = 0.0;
  CvReport report;
  RowSplit split;
};

// Splits rows with `seed`, tunes lambda on the first part, fits the second
// part at the selected lambda.
TuneResult tune_and_fit(const ResponseData& data, const Hyperparameters& hyper, const FitConfig& cfg,
                        const CvConfig& cv, std::uint64_t seed);

}  // namespace bjme
