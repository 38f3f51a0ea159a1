#include "bjme/optimizer.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bjme/gradients.hpp"
#include "bjme/kernels.hpp"
#include "bjme/rng.hpp"
#include "bjme/simulate.hpp"

namespace bjme {

void FitConfig::validate() const {
  if (max_outer_iters < 0) throw std::invalid_argument("max_outer_iters must be >= 0");
  if (!(obj_tol > 0.0)) throw std::invalid_argument("obj_tol must be > 0");
  if (!(line_search.initial_step > 0.0)) throw std::invalid_argument("initial step must be > 0");
  if (!(line_search.shrink > 0.0 && line_search.shrink < 1.0))
    throw std::invalid_argument("line-search shrink factor must lie in (0, 1)");
  if (line_search.max_backtracks < 0) throw std::invalid_argument("max_backtracks must be >= 0");
  if (!(line_search.sufficient_increase > 0.0))
    throw std::invalid_argument("sufficient-increase constant must be > 0");
  if (n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
  if (!(loading_zero_threshold >= 0.0)) throw std::invalid_argument("loading_zero_threshold must be >= 0");
}

Vector soft_threshold(const Vector& z, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("soft_threshold needs t >= 0");
  Vector out(z.size());
  for (Index k = 0; k < z.size(); ++k) {
    const double mag = std::abs(z(k)) - t;
    out(k) = mag > 0.0 ? std::copysign(mag, z(k)) : 0.0;
  }
  return out;
}

ModelState random_init(const ResponseData& data, const Hyperparameters& hyper, std::uint64_t seed,
                       StartStrategy strategy) {
  const Index n = data.n_respondents();
  const Index J = data.n_items();
  const Index K = hyper.n_factors();
  auto rng = make_stream(seed, streams::kInit);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  std::bernoulli_distribution coin;

  ModelState s;
  const Matrix L = hyper.sigma_theta().llt().matrixL();
  s.theta.resize(n, K);
  for (Index i = 0; i < n; ++i) {
    Vector z(K);
    for (Index k = 0; k < K; ++k) z(k) = normal(rng);
    s.theta.row(i) = (L * z).transpose();
  }
  s.loadings.resize(J, K);
  for (Index j = 0; j < J; ++j)
    for (Index k = 0; k < K; ++k) {
      const double mag = 0.5 + 1.5 * unit(rng);
      s.loadings(j, k) = strategy == StartStrategy::signed_dense && coin(rng) ? -mag : mag;
    }
  if (strategy == StartStrategy::sparse_positive) {
    std::vector<Index> factors(static_cast<std::size_t>(K));
    for (Index j = 0; j < J; ++j) {
      const double u = unit(rng);
      const Index n_loaded = std::min<Index>(K, u < 0.6 ? 1 : (u < 0.8 ? 2 : 3));
      std::iota(factors.begin(), factors.end(), Index{0});
      std::shuffle(factors.begin(), factors.end(), rng);
      for (Index l = n_loaded; l < K; ++l) s.loadings(j, factors[l]) = 0.0;
    }
  }
  s.intercepts.resize(J);
  for (Index j = 0; j < J; ++j) s.intercepts[j] = draw_intercepts(default_intercept_ranges(data.categories[j]), rng);
  return s;
}

Vector update_theta(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                    const FitConfig& cfg, Index i) {
  const Vector theta = state.theta.row(i).transpose();
  const Vector g = grad_theta_at(data, state, hyper, i, theta);
  const double gg = g.squaredNorm();
  if (gg == 0.0) return theta;
  const double f0 = respondent_objective(data, state, hyper, i, theta);
  const auto& ls = cfg.line_search;
  double step = ls.initial_step;
  for (int b = 0; b <= ls.max_backtracks; ++b, step *= ls.shrink) {
    Vector cand = theta + step * g;
    const double f = respondent_objective(data, state, hyper, i, cand);
    if (f >= f0 + ls.sufficient_increase * step * gg) return cand;
  }
  return theta;
}

Vector update_a(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                const FitConfig& cfg, Index j) {
  const Vector a = state.loadings.row(j).transpose();
  const Vector& d = state.intercepts[j];
  const double lambda = hyper.lambda();
  const Vector g = grad_a_loglik_at(data, state, j, a);
  const double f0 = item_loglik(data, state, j, a, d) - lambda * a.lpNorm<1>();
  const auto& ls = cfg.line_search;
  double step = ls.initial_step;
  for (int b = 0; b <= ls.max_backtracks; ++b, step *= ls.shrink) {
    Vector cand = soft_threshold(a + step * g, lambda * step);
    // Gradient mapping of the proximal step.
    const double gg = (cand - a).squaredNorm() / (step * step);
    if (gg == 0.0) return a;
    const double f = item_loglik(data, state, j, cand, d) - lambda * cand.lpNorm<1>();
    if (f >= f0 + ls.sufficient_increase * step * gg) return cand;
  }
  return a;
}

Vector update_d(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                const FitConfig& cfg, Index j) {
  const Vector a = state.loadings.row(j).transpose();
  const Vector& d = state.intercepts[j];
  const Vector delta = to_delta(d);
  const Vector g = grad_delta_at(data, state, hyper, j, a, delta);
  const double gg = g.squaredNorm();
  if (gg == 0.0) return d;
  const double f0 = item_loglik(data, state, j, a, d) + log_prior_d(d, hyper.sigma_d_sq());
  const auto& ls = cfg.line_search;
  double step = ls.initial_step;
  for (int b = 0; b <= ls.max_backtracks; ++b, step *= ls.shrink) {
    Vector cand = to_intercepts(delta + step * g);
    if (!cand.allFinite()) continue;
    bool ordered = true;
    for (Index c = 1; c < cand.size(); ++c) ordered = ordered && cand(c - 1) > cand(c);
    if (!ordered) continue;  // exp underflow to a zero gap
    const double f = item_loglik(data, state, j, a, cand) + log_prior_d(cand, hyper.sigma_d_sq());
    if (f >= f0 + ls.sufficient_increase * step * gg) return cand;
  }
  return d;
}

FitResult fit(const ResponseData& data, const Hyperparameters& hyper, const FitConfig& cfg,
              const std::optional<ModelState>& init) {
  data.validate();
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  FitResult result;
  result.state = init ? *init : random_init(data, hyper, cfg.seed, cfg.start);
  ModelState& state = result.state;
  state.validate(data);
  if (state.n_factors() != hyper.n_factors())
    throw std::invalid_argument("state and sigma_theta differ in number of factors");

  double current = kernels::objective(data, state, hyper, cfg);
  if (!std::isfinite(current)) throw std::runtime_error("objective is not finite at the initial state");
  result.objective_trace.push_back(current);

  for (int t = 0; t < cfg.max_outer_iters; ++t) {
    kernels::theta_phase(data, state, hyper, cfg);
    kernels::item_phase(data, state, hyper, cfg);
    const double next = kernels::objective(data, state, hyper, cfg);
    if (!std::isfinite(next)) throw std::runtime_error("objective became non-finite during fit");
    result.objective_trace.push_back(next);
    result.n_iters = t + 1;
    const double change = std::abs(next - current);
    current = next;
    if (change < cfg.obj_tol) {
      result.converged = true;
      break;
    }
  }
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

FitResult fit_multistart(const ResponseData& data, const Hyperparameters& hyper, const FitConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::optional<FitResult> best;
  for (int s = 0; s < cfg.n_starts; ++s) {
    FitConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(s);
    FitResult r = fit(data, hyper, run_cfg);
    if (!best || r.final_objective() > best->final_objective()) best = std::move(r);
  }
  best->elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return std::move(*best);
}

}  // namespace bjme
