#include "bjme/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "bjme/align.hpp"

namespace bjme {

std::vector<Range> default_intercept_ranges(int categories) {
  if (categories < 2) throw std::invalid_argument("need at least 2 categories");
  if (categories == 2) return {{-1.5, 1.5}};
  const int n_thr = categories - 1;
  const double spacing = 2.25 / (n_thr - 1);
  const double half = std::min(0.375, spacing / 2.0);
  std::vector<Range> out;
  for (int c = 0; c < n_thr; ++c) {
    const double center = 1.125 - spacing * c;
    out.push_back({center - half, center + half});
  }
  return out;
}

Vector draw_intercepts(const std::vector<Range>& ranges, Rng& rng) {
  Vector d(static_cast<Index>(ranges.size()));
  for (std::size_t c = 0; c < ranges.size(); ++c) {
    std::uniform_real_distribution<double> u(ranges[c].lo, ranges[c].hi);
    d(static_cast<Index>(c)) = u(rng);
  }
  std::sort(d.begin(), d.end(), std::greater<>());
  for (Index c = 1; c < d.size(); ++c)
    if (!(d(c - 1) > d(c))) throw std::runtime_error("intercept draw produced a tie");
  return d;
}

std::vector<Range> SimDesign::resolved_intercept_ranges() const {
  return intercept_ranges.empty() ? default_intercept_ranges(categories) : intercept_ranges;
}

void SimDesign::validate() const {
  if (n < 1 || j < 1 || k < 1) throw std::invalid_argument("design sizes must be positive");
  if (categories < 2) throw std::invalid_argument("design needs at least 2 categories");
  const double total = q_proportions[0] + q_proportions[1] + q_proportions[2];
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("q proportions must sum to 1");
  for (double p : q_proportions)
    if (p < 0.0) throw std::invalid_argument("q proportions must be nonnegative");
  if (!(loading_range.lo > 0.0 && loading_range.hi >= loading_range.lo))
    throw std::invalid_argument("loading range must be positive and ordered");
  const auto ranges = resolved_intercept_ranges();
  if (static_cast<int>(ranges.size()) != categories - 1)
    throw std::invalid_argument("need one intercept range per threshold");
  for (std::size_t c = 0; c < ranges.size(); ++c) {
    if (!(ranges[c].hi >= ranges[c].lo)) throw std::invalid_argument("intercept range reversed");
    if (c && ranges[c].hi > ranges[c - 1].lo)
      throw std::invalid_argument("intercept ranges must be disjoint and decreasing");
  }
  if (k < 2 && q_proportions[1] > 0.0) throw std::invalid_argument("two-factor items need K >= 2");
  if (k < 3 && q_proportions[2] > 0.0) throw std::invalid_argument("three-factor items need K >= 3");
}

Matrix gen_sigma(Index k, double rho) {
  if (k < 1) throw std::invalid_argument("K must be positive");
  const double lower = k > 1 ? -1.0 / static_cast<double>(k - 1) : -1.0;
  if (!(rho > lower && rho < 1.0)) throw std::invalid_argument("rho outside (-1/(K-1), 1)");
  return rho * Matrix::Ones(k, k) + (1.0 - rho) * Matrix::Identity(k, k);
}

QMatrix gen_q(const SimDesign& design) {
  design.validate();
  const Index J = design.j;
  const Index K = design.k;
  const auto n1 = static_cast<Index>(std::llround(design.q_proportions[0] * static_cast<double>(J)));
  const auto n2 = static_cast<Index>(std::llround(design.q_proportions[1] * static_cast<double>(J)));
  const Index n3 = J - n1 - n2;
  if (n3 < 0 || (design.q_proportions[2] == 0.0 && n3 > 0))
    throw std::invalid_argument("q proportions do not round to integer item counts");

  std::vector<int> pattern;  // number of loaded factors per item
  pattern.insert(pattern.end(), static_cast<std::size_t>(n1), 1);
  pattern.insert(pattern.end(), static_cast<std::size_t>(n2), 2);
  pattern.insert(pattern.end(), static_cast<std::size_t>(n3), 3);
  auto rng = make_stream(design.seed, streams::kQMatrix);
  std::shuffle(pattern.begin(), pattern.end(), rng);

  // Deal factors in pattern order 1s, 2s, 3s so the single-loading items
  // cover every column first.
  std::vector<Index> order(static_cast<std::size_t>(J));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return pattern[a] < pattern[b]; });

  QMatrix q;
  q.entries = IntMatrix::Zero(J, K);
  Index cursor = 0;
  for (Index item : order) {
    for (int l = 0; l < pattern[item]; ++l) q.entries(item, (cursor + l) % K) = 1;
    cursor = (cursor + 1) % K;
  }
  return q;
}

Truth gen_true_params(const SimDesign& design) {
  design.validate();
  Truth t;
  t.q = gen_q(design);
  t.sigma = gen_sigma(design.k, design.rho);
  auto rng = make_stream(design.seed, streams::kTruth);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> loading(design.loading_range.lo, design.loading_range.hi);

  const Matrix L = t.sigma.llt().matrixL();
  t.state.theta.resize(design.n, design.k);
  for (Index i = 0; i < design.n; ++i) {
    Vector z(design.k);
    for (Index k = 0; k < design.k; ++k) z(k) = normal(rng);
    t.state.theta.row(i) = (L * z).transpose();
  }
  t.state.loadings.resize(design.j, design.k);
  for (Index j = 0; j < design.j; ++j)
    for (Index k = 0; k < design.k; ++k) {
      const double u = loading(rng);
      t.state.loadings(j, k) = t.q.entries(j, k) ? u : 0.0;
    }
  const auto ranges = design.resolved_intercept_ranges();
  t.state.intercepts.resize(static_cast<std::size_t>(design.j));
  for (Index j = 0; j < design.j; ++j) t.state.intercepts[j] = draw_intercepts(ranges, rng);
  return t;
}

ResponseData sample_responses(const ModelState& truth, const std::vector<int>& categories,
                              std::uint64_t seed) {
  const Index n = truth.n_respondents();
  const Index J = truth.n_items();
  if (static_cast<Index>(categories.size()) != J)
    throw std::invalid_argument("one category count per item required");
  for (Index j = 0; j < J; ++j)
    if (truth.intercepts[j].size() != categories[j] - 1)
      throw std::invalid_argument("intercept length does not match category count");
  auto rng = make_stream(seed, streams::kResponses);
  std::uniform_real_distribution<double> unit;
  ResponseData data;
  data.responses.resize(n, J);
  data.mask = MaskMatrix::Ones(n, J);
  data.categories = categories;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < J; ++j) {
      const double eta = truth.theta.row(i).dot(truth.loadings.row(j));
      const double u = unit(rng);
      // Y >= c exactly when u < P(Y >= c); cumulative probabilities decrease in c.
      int y = 0;
      const Vector& d = truth.intercepts[j];
      while (y < d.size() && u < inverse_logit(eta + d(y))) ++y;
      data.responses(i, j) = y;
    }
  }
  return data;
}

ReplicationResult run_replication(const SimDesign& design, const ReplicationOptions& opts) {
  const Truth truth = gen_true_params(design);
  std::vector<int> cats(static_cast<std::size_t>(design.j), design.categories);
  const ResponseData data = sample_responses(truth.state, cats, design.seed);
  const Hyperparameters hyper(truth.sigma, opts.fixed_lambda.value_or(1.0));

  FitConfig cfg = opts.fit;
  cfg.seed = design.seed;
  ReplicationResult out;
  out.seed = design.seed;
  ModelState truth_rows;
  if (opts.fixed_lambda) {
    out.fit = fit_multistart(data, hyper, cfg);
    out.lambda = *opts.fixed_lambda;
    truth_rows = truth.state;
  } else {
    TuneResult tuned = tune_and_fit(data, hyper, cfg, opts.cv, design.seed);
    out.fit = std::move(tuned.fit);
    out.lambda = tuned.lambda_hat;
    truth_rows = truth.state;
    truth_rows.theta = RowMatrix(static_cast<Index>(tuned.split.second_rows.size()), design.k);
    for (std::size_t r = 0; r < tuned.split.second_rows.size(); ++r)
      truth_rows.theta.row(static_cast<Index>(r)) = truth.state.theta.row(tuned.split.second_rows[r]);
  }
  const Alignment al = best_alignment(out.fit.state.loadings, truth.state.loadings);
  out.fit.state = apply_alignment(out.fit.state, al);
  out.selection = selection_metrics(q_from_loadings(out.fit.state.loadings, cfg.loading_zero_threshold), truth.q);
  out.recovery = recovery_metrics(out.fit.state, truth_rows, truth.q);
  return out;
}

}  // namespace bjme
