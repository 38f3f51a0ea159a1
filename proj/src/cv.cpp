#include "bjme/cv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bjme/rng.hpp"

namespace bjme {

MaskMatrix FoldAssignment::held_out_mask(int m) const {
  return (fold_of.array() == m).cast<std::uint8_t>().matrix();
}

MaskMatrix FoldAssignment::training_mask(int m) const {
  return (fold_of.array() >= 0 && fold_of.array() != m).cast<std::uint8_t>().matrix();
}

Index FoldAssignment::fold_size(int m) const { return (fold_of.array() == m).count(); }

FoldAssignment make_folds(const MaskMatrix& mask, int n_folds, std::uint64_t seed) {
  if (n_folds < 1) throw std::invalid_argument("number of folds must be >= 1");
  std::vector<std::pair<Index, Index>> cells;
  for (Index i = 0; i < mask.rows(); ++i)
    for (Index j = 0; j < mask.cols(); ++j)
      if (mask(i, j)) cells.emplace_back(i, j);
  if (static_cast<Index>(cells.size()) < n_folds)
    throw std::invalid_argument("fewer observed cells than folds");
  auto rng = make_stream(seed, streams::kFolds);
  std::shuffle(cells.begin(), cells.end(), rng);
  FoldAssignment f;
  f.n_folds = n_folds;
  f.fold_of = IntMatrix::Constant(mask.rows(), mask.cols(), -1);
  for (std::size_t c = 0; c < cells.size(); ++c)
    f.fold_of(cells[c].first, cells[c].second) = static_cast<int>(c % static_cast<std::size_t>(n_folds));
  return f;
}

LambdaGrid::LambdaGrid(std::vector<double> v) : values(std::move(v)) {
  if (values.empty()) throw std::invalid_argument("lambda grid must be non-empty");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0) || !std::isfinite(values[k]))
      throw std::invalid_argument("lambda grid values must be positive and finite");
    if (k && !(values[k] > values[k - 1])) throw std::invalid_argument("lambda grid must be strictly increasing");
  }
}

LambdaGrid LambdaGrid::first_stage() { return LambdaGrid({0.01, 0.1, 1.0, 10.0, 100.0}); }

LambdaGrid second_stage_grid(double lambda_hat) {
  if (!(lambda_hat > 0.0) || !std::isfinite(lambda_hat))
    throw std::invalid_argument("second_stage_grid needs lambda_hat > 0");
  constexpr int kPoints = 5;
  const double lo = std::max(0.0, lambda_hat / 5.0);
  const double hi = 5.0 * lambda_hat;
  std::vector<double> v(kPoints);
  for (int k = 0; k < kPoints; ++k)
    v[k] = std::max(lo + (hi - lo) * k / (kPoints - 1), std::numeric_limits<double>::min());
  v.back() = hi;
  return LambdaGrid(std::move(v));
}

void CvConfig::validate() const {
  if (folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  if (n_starts < 1) throw std::invalid_argument("CV n_starts must be >= 1");
}

double held_out_error(const ResponseData& data, const FoldAssignment& folds, int m, const ModelState& state) {
  double err = 0.0;
  for (Index i = 0; i < data.n_respondents(); ++i) {
    for (Index j = 0; j < data.n_items(); ++j) {
      if (folds.fold_of(i, j) != m) continue;
      const double eta = state.theta.row(i).dot(state.loadings.row(j));
      err -= cell::log_prob(eta, state.intercepts[j], data.responses(i, j));
    }
  }
  return err;
}

FoldFit cv_fold_fit(const ResponseData& data, const FoldAssignment& folds, int m, double lambda,
                    const Hyperparameters& hyper, const FitConfig& cfg, int n_starts,
                    const std::optional<ModelState>& init) {
  if (m < 0 || m >= folds.n_folds) throw std::out_of_range("fold index out of range");
  if (folds.fold_of.rows() != data.n_respondents() || folds.fold_of.cols() != data.n_items())
    throw std::invalid_argument("fold assignment does not match data shape");
  const ResponseData training = data.with_mask(folds.training_mask(m));
  const Hyperparameters h = hyper.with_lambda(lambda);
  FitConfig run_cfg = cfg;
  run_cfg.seed = splitmix64(cfg.seed + static_cast<std::uint64_t>(m));
  FoldFit out;
  if (init) {
    out.fit = fit(training, h, run_cfg, init);
  } else {
    run_cfg.n_starts = n_starts;
    out.fit = fit_multistart(training, h, run_cfg);
  }
  out.error = folds.fold_size(m) ? held_out_error(data, folds, m, out.fit.state) : 0.0;
  return out;
}

double cv_error(const ResponseData& data, const FoldAssignment& folds, int m, double lambda,
                const Hyperparameters& hyper, const FitConfig& cfg, const std::optional<ModelState>& init) {
  return cv_fold_fit(data, folds, m, lambda, hyper, cfg, 1, init).error;
}

std::size_t argmin_lambda(const std::vector<CvRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("empty CV table");
  std::size_t best = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const bool better = rows[r].total < rows[best].total ||
                        (rows[r].total == rows[best].total && rows[r].lambda > rows[best].lambda);
    if (better) best = r;
  }
  return best;
}

namespace {

// Evaluates every candidate over every fold. `states` carries each fold's
// latest solution for warm starts and is updated in place.
CvStage run_stage(const ResponseData& train, const FoldAssignment& folds, const LambdaGrid& grid,
                  const Hyperparameters& hyper, const FitConfig& cfg, const CvConfig& cv,
                  std::vector<std::optional<ModelState>>& states, int& n_fits) {
  CvStage stage;
  std::vector<std::vector<ModelState>> solutions(grid.values.size());
  for (std::size_t c = 0; c < grid.values.size(); ++c) {
    const double lambda = grid.values[c];
    CvRow row;
    row.lambda = lambda;
    row.fold_errors.assign(static_cast<std::size_t>(cv.folds), 0.0);
    std::vector<ModelState> fold_states(static_cast<std::size_t>(cv.folds));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < cv.folds; ++m) {
      try {
        const auto& init = cv.warm_start ? states[m] : std::optional<ModelState>{};
        FoldFit ff = cv_fold_fit(train, folds, m, lambda, hyper, cfg, cv.n_starts, init);
        row.fold_errors[m] = ff.error;
        fold_states[m] = std::move(ff.fit.state);
      } catch (...) {
#pragma omp critical
        failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    n_fits += cv.folds;
    for (double e : row.fold_errors) row.total += e;
    if (cv.warm_start)
      for (int m = 0; m < cv.folds; ++m) states[m] = fold_states[m];
    solutions[c] = std::move(fold_states);
    stage.rows.push_back(std::move(row));
  }
  const std::size_t best = argmin_lambda(stage.rows);
  stage.rows[best].selected = true;
  stage.best_lambda = stage.rows[best].lambda;
  // The next stage starts from the winning candidate's solutions.
  if (cv.warm_start)
    for (int m = 0; m < cv.folds; ++m) states[m] = solutions[best][m];
  return stage;
}

}  // namespace

CvReport select_lambda(const ResponseData& train, const Hyperparameters& hyper, const FitConfig& cfg,
                       const CvConfig& cv) {
  cv.validate();
  train.validate();
  const FoldAssignment folds = make_folds(train.mask, cv.folds, cfg.seed);
  std::vector<std::optional<ModelState>> states(static_cast<std::size_t>(cv.folds));
  CvReport report;
  report.stage1 = run_stage(train, folds, cv.stage1, hyper, cfg, cv, states, report.n_fits);
  report.stage2 =
      run_stage(train, folds, second_stage_grid(report.stage1.best_lambda), hyper, cfg, cv, states, report.n_fits);
  report.lambda_hat = report.stage2.best_lambda;
  return report;
}

TuneResult tune_and_fit(const ResponseData& data, const Hyperparameters& hyper, const FitConfig& cfg,
                        const CvConfig& cv, std::uint64_t seed) {
  cv.validate();
  TuneResult out;
  out.split = split_rows(data, cv.train_fraction, seed);
  out.report = select_lambda(out.split.first, hyper, cfg, cv);
  out.lambda_hat = out.report.lambda_hat;
  out.fit = fit_multistart(out.split.second, hyper.with_lambda(out.lambda_hat), cfg);
  return out;
}

}  // namespace bjme
