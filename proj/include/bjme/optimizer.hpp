#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bjme/model.hpp"

namespace bjme {

struct LineSearch {
  double initial_step = 1.0;
  double shrink = 0.5;
  int max_backtracks = 30;
  // Accept when the block objective rises by at least this * step * |g|^2.
  double sufficient_increase = 1e-4;
};

// How random starting loadings are drawn. All strategies draw theta from
// N(0, Sigma_theta) and intercepts from the simulation ranges.
enum class StartStrategy {
  signed_dense,     // every |a_jk| ~ U(0.5, 2) with a random sign
  positive_dense,   // every a_jk ~ U(0.5, 2)
  sparse_positive,  // a_jk ~ U(0.5, 2) on 1/2/3 random factors (60/20/20), else 0
};

struct FitConfig {
  int max_outer_iters = 1000;
  // Stop once the absolute change of the objective between outer
  // iterations drops below this value.
  double obj_tol = 5.0;
  LineSearch line_search;
  int threads = 0;  // <= 0: OpenMP default
  std::uint64_t seed = 0;
  int n_starts = 1;
  double loading_zero_threshold = 0.01;
  Execution execution = Execution::parallel;
  StartStrategy start = StartStrategy::sparse_positive;

  void validate() const;
};

struct FitResult {
  ModelState state;
  std::vector<double> objective_trace;  // initial value first, then one per outer iteration
  int n_iters = 0;
  bool converged = false;
  double elapsed_seconds = 0.0;

  double final_objective() const { return objective_trace.back(); }
};

// Proximal operator of t * |.|_1: sign(z) * max(|z| - t, 0) per component.
Vector soft_threshold(const Vector& z, double t);

// Random start: theta_i ~ N(0, Sigma_theta), |a_jk| ~ U(0.5, 2) with a random
// sign, intercepts drawn from the simulation ranges and sorted.
ModelState random_init(const ResponseData& data, const Hyperparameters& hyper, std::uint64_t seed,
                       StartStrategy strategy = StartStrategy::signed_dense);

// Single block updates. Each returns the new block value; when the line
// search is exhausted the current value is returned unchanged.
Vector update_theta(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                    const FitConfig& cfg, Index i);
Vector update_a(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                const FitConfig& cfg, Index j);
// Ascent in delta coordinates at the current loadings row of `state`; the
// returned intercepts are strictly decreasing.
Vector update_d(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                const FitConfig& cfg, Index j);

// Alternating maximization: all theta_i, then every (a_j, d_j), until the
// objective change falls below obj_tol. Deterministic for a given seed and
// init regardless of thread count.
FitResult fit(const ResponseData& data, const Hyperparameters& hyper, const FitConfig& cfg,
              const std::optional<ModelState>& init = std::nullopt);

// Runs fit from seeds seed, seed + 1, ..., seed + n_starts - 1 and keeps the
// run with the largest final objective (earliest wins ties).
FitResult fit_multistart(const ResponseData& data, const Hyperparameters& hyper, const FitConfig& cfg);

}  // namespace bjme
