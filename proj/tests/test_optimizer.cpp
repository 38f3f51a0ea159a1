#include <cmath>
#include <random>

#include "bjme/kernels.hpp"
#include "bjme/optimizer.hpp"
#include "bjme/simulate.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bjme;

namespace {

// Minimizes 0.5 (x - z)^2 + t |x| over a uniform grid.
double grid_prox(double z, double t, double step) {
  const double lo = -std::abs(z) - 1.0;
  const double hi = std::abs(z) + 1.0;
  double best_x = 0.0;
  double best_f = 0.5 * z * z;
  for (double x = lo; x <= hi; x += step) {
    const double f = 0.5 * (x - z) * (x - z) + t * std::abs(x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  return best_x;
}

struct Problem {
  ResponseData data;
  Truth truth;
};

Problem small_problem(std::uint64_t seed, Index n = 120, Index J = 12) {
  SimDesign d;
  d.n = n;
  d.j = J;
  d.seed = seed;
  Problem p;
  p.truth = gen_true_params(d);
  p.data = sample_responses(p.truth.state, std::vector<int>(J, 4), seed);
  return p;
}

}  // namespace

TEST_CASE("soft threshold against a grid search") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> zdist(-3.0, 3.0), tdist(0.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    const double z = zdist(rng), t = tdist(rng);
    Vector v(1);
    v(0) = z;
    CHECK(std::abs(soft_threshold(v, t)(0) - grid_prox(z, t, 1e-4)) < 2e-4);
  }
  Vector v(3);
  v << 1.5, -0.2, -3.0;
  const Vector out = soft_threshold(v, 0.5);
  CHECK(out(0) == doctest::Approx(1.0));
  CHECK(out(1) == 0.0);
  CHECK(out(2) == doctest::Approx(-2.5));
  CHECK_THROWS(soft_threshold(v, -1.0));
}

TEST_CASE("each block update does not decrease its block objective") {
  std::mt19937_64 rng(17);
  auto inst = testing::random_instance(rng, 15, 8, 2, {2, 4});
  const Hyperparameters hyper(inst.sigma, 2.0);
  FitConfig cfg;
  auto& s = inst.state;
  for (Index i = 0; i < 15; ++i) {
    const double before = respondent_objective(inst.data, s, hyper, i, s.theta.row(i).transpose());
    const Vector t = update_theta(inst.data, s, hyper, cfg, i);
    CHECK(respondent_objective(inst.data, s, hyper, i, t) >= before);
  }
  for (Index j = 0; j < 8; ++j) {
    const Vector a0 = s.loadings.row(j).transpose();
    const double before = item_loglik(inst.data, s, j, a0, s.intercepts[j]) - 2.0 * a0.lpNorm<1>();
    const Vector a = update_a(inst.data, s, hyper, cfg, j);
    CHECK(item_loglik(inst.data, s, j, a, s.intercepts[j]) - 2.0 * a.lpNorm<1>() >= before);
    const double dbefore = item_loglik(inst.data, s, j, a0, s.intercepts[j]) +
                           log_prior_d(s.intercepts[j], hyper.sigma_d_sq());
    const Vector d = update_d(inst.data, s, hyper, cfg, j);
    CHECK(item_loglik(inst.data, s, j, a0, d) + log_prior_d(d, hyper.sigma_d_sq()) >= dbefore);
    for (Index c = 1; c < d.size(); ++c) CHECK(d(c) < d(c - 1));
  }
}

TEST_CASE("fit ascends and keeps intercepts ordered") {
  auto p = small_problem(1);
  const Hyperparameters hyper(p.truth.sigma, 5.0);
  FitConfig cfg;
  cfg.obj_tol = 1e-2;
  cfg.seed = 4;
  const auto r = fit(p.data, hyper, cfg);
  CHECK(r.converged);
  for (std::size_t t = 1; t < r.objective_trace.size(); ++t)
    CHECK(r.objective_trace[t] >= r.objective_trace[t - 1] - 1e-8);
  CHECK(r.state.intercepts_ordered());
  CHECK(r.final_objective() == doctest::Approx(objective(p.data, r.state, hyper)).epsilon(1e-12));
}

TEST_CASE("a large penalty zeroes every loading") {
  auto p = small_problem(2);
  const Hyperparameters hyper(p.truth.sigma, 1e4);
  FitConfig cfg;
  cfg.seed = 1;
  const auto r = fit(p.data, hyper, cfg);
  CHECK(r.state.loadings.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero penalty leaves loadings dense") {
  auto p = small_problem(3);
  const Hyperparameters hyper(p.truth.sigma, 0.0);
  FitConfig cfg;
  cfg.seed = 2;
  cfg.start = StartStrategy::positive_dense;
  const auto r = fit(p.data, hyper, cfg);
  CHECK((r.state.loadings.array() == 0.0).count() == 0);
}

TEST_CASE("fit is deterministic and independent of the thread count") {
  auto p = small_problem(4);
  const Hyperparameters hyper(p.truth.sigma, 3.0);
  FitConfig cfg;
  cfg.seed = 9;
  cfg.threads = 1;
  const auto r1 = fit(p.data, hyper, cfg);
  cfg.threads = 4;
  const auto r4 = fit(p.data, hyper, cfg);
  cfg.execution = Execution::serial;
  const auto rs = fit(p.data, hyper, cfg);
  CHECK(r1.objective_trace == r4.objective_trace);
  CHECK(r1.objective_trace == rs.objective_trace);
  CHECK(r1.state.theta == r4.state.theta);
  CHECK(r1.state.loadings == rs.state.loadings);
}

TEST_CASE("fully missing respondents collapse to the prior mode") {
  auto p = small_problem(5, 60, 10);
  MaskMatrix mask = p.data.mask;
  mask.row(7).setZero();
  mask.row(20).setZero();
  const auto data = p.data.with_mask(mask);
  const auto hyper = Hyperparameters::identity(3, 3.0);
  FitConfig cfg;
  cfg.seed = 3;
  const auto r = fit(data, hyper, cfg);
  CHECK(r.state.theta.row(7).norm() < 1e-3);
  CHECK(r.state.theta.row(20).norm() < 1e-3);
}

TEST_CASE("multistart keeps the best objective") {
  auto p = small_problem(6, 80, 10);
  const Hyperparameters hyper(p.truth.sigma, 3.0);
  FitConfig cfg;
  cfg.seed = 10;
  cfg.n_starts = 3;
  const auto best = fit_multistart(p.data, hyper, cfg);
  cfg.n_starts = 1;
  for (int s = 0; s < 3; ++s) {
    cfg.seed = 10 + s;
    CHECK(fit(p.data, hyper, cfg).final_objective() <= best.final_objective());
  }
}

TEST_CASE("random starts follow the chosen strategy") {
  auto p = small_problem(7, 30, 12);
  const auto hyper = Hyperparameters::identity(3, 1.0);
  const auto dense = random_init(p.data, hyper, 1, StartStrategy::positive_dense);
  CHECK(dense.loadings.minCoeff() >= 0.5);
  const auto sparse = random_init(p.data, hyper, 1, StartStrategy::sparse_positive);
  for (Index j = 0; j < 12; ++j) {
    const auto nz = (sparse.loadings.row(j).array() != 0.0).count();
    CHECK(nz >= 1);
    CHECK(nz <= 3);
  }
  CHECK(sparse.intercepts_ordered());
  const auto again = random_init(p.data, hyper, 1, StartStrategy::sparse_positive);
  CHECK(again.loadings == sparse.loadings);
}

TEST_CASE("config validation") {
  FitConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.obj_tol = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = FitConfig{};
  cfg.line_search.shrink = 1.0;
  CHECK_THROWS(cfg.validate());
  cfg = FitConfig{};
  cfg.n_starts = 0;
  CHECK_THROWS(cfg.validate());
}
