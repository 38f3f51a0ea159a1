#include "bjme/kernels.hpp"

#include <omp.h>

namespace bjme::kernels {

namespace {

void update_item(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                 const FitConfig& cfg, Index j) {
  state.loadings.row(j) = update_a(data, state, hyper, cfg, j).transpose();
  state.intercepts[j] = update_d(data, state, hyper, cfg, j);
}

double respondent_term(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                       Index i) {
  return respondent_objective(data, state, hyper, i, state.theta.row(i).transpose());
}

double item_prior_terms(const ModelState& state, const Hyperparameters& hyper) {
  double total = 0.0;
  for (Index j = 0; j < state.n_items(); ++j) {
    total += loadings_prior_term(state.loadings.row(j).transpose(), hyper.lambda());
    total += log_prior_d(state.intercepts[j], hyper.sigma_d_sq());
  }
  return total;
}

}  // namespace

int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

void theta_phase_serial(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                        const FitConfig& cfg) {
  for (Index i = 0; i < data.n_respondents(); ++i)
    state.theta.row(i) = update_theta(data, state, hyper, cfg, i).transpose();
}

void theta_phase_parallel(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                          const FitConfig& cfg) {
  const Index n = data.n_respondents();
  const int nt = resolve_threads(cfg.threads);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (Index i = 0; i < n; ++i)
    state.theta.row(i) = update_theta(data, state, hyper, cfg, i).transpose();
}

void item_phase_serial(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                       const FitConfig& cfg) {
  for (Index j = 0; j < data.n_items(); ++j) update_item(data, state, hyper, cfg, j);
}

void item_phase_parallel(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                         const FitConfig& cfg) {
  const Index J = data.n_items();
  const int nt = resolve_threads(cfg.threads);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (Index j = 0; j < J; ++j) update_item(data, state, hyper, cfg, j);
}

double objective_serial(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper) {
  double total = 0.0;
  for (Index i = 0; i < data.n_respondents(); ++i) total += respondent_term(data, state, hyper, i);
  return total + item_prior_terms(state, hyper);
}

double objective_parallel(const ResponseData& data, const ModelState& state,
                          const Hyperparameters& hyper, int threads) {
  const Index n = data.n_respondents();
  Vector rows(n);
  const int nt = resolve_threads(threads);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
  for (Index i = 0; i < n; ++i) rows(i) = respondent_term(data, state, hyper, i);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) total += rows(i);
  return total + item_prior_terms(state, hyper);
}

}  // namespace bjme::kernels
