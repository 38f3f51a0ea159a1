#include <random>

#include "bjme/gradients.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bjme;
using testing::central_difference;
using testing::gradients_agree;

namespace {

// Checks every block gradient of one instance against finite differences.
void check_instance(const testing::Instance& inst, double lambda) {
  const Hyperparameters hyper(inst.sigma, lambda);
  const auto& data = inst.data;
  const auto& state = inst.state;
  for (Index i = 0; i < data.n_respondents(); ++i) {
    auto f = [&](const Vector& t) { return respondent_objective(data, state, hyper, i, t); };
    const Vector x = state.theta.row(i).transpose();
    CHECK(gradients_agree(grad_theta(data, state, hyper, i), central_difference(f, x)));
  }
  for (Index j = 0; j < data.n_items(); ++j) {
    const Vector a = state.loadings.row(j).transpose();
    auto fa = [&](const Vector& v) { return item_loglik(data, state, j, v, state.intercepts[j]); };
    CHECK(gradients_agree(grad_a_loglik(data, state, j), central_difference(fa, a)));

    auto fd = [&](const Vector& delta) {
      const Vector d = to_intercepts(delta);
      return item_loglik(data, state, j, a, d) + log_prior_d(d, hyper.sigma_d_sq());
    };
    const Vector delta = to_delta(state.intercepts[j]);
    CHECK(gradients_agree(grad_delta(data, state, hyper, j), central_difference(fd, delta)));
  }
}

}  // namespace

TEST_CASE("delta map round trips and always yields ordered intercepts") {
  Vector d(3);
  d << 1.2, 0.1, -0.7;
  const Vector back = to_intercepts(to_delta(d));
  for (Index c = 0; c < 3; ++c) CHECK(back(c) == doctest::Approx(d(c)).epsilon(1e-14));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    Vector delta(4);
    for (Index c = 0; c < 4; ++c) delta(c) = normal(rng);
    const Vector out = to_intercepts(delta);
    for (Index c = 1; c < 4; ++c) CHECK(out(c) < out(c - 1));
  }
}

TEST_CASE("block gradients match finite differences on random instances") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = 2 + static_cast<Index>(rng() % 9);
    const Index J = 2 + static_cast<Index>(rng() % 9);
    const Index K = 1 + static_cast<Index>(rng() % 3);
    const auto inst = testing::random_instance(rng, n, J, K, {2, 4}, rep % 3 == 0 ? 0.2 : 0.0);
    check_instance(inst, 0.5 + rep);
  }
}

TEST_CASE("a row with no observed cells has a pure prior gradient") {
  std::mt19937_64 rng(8);
  auto inst = testing::random_instance(rng, 4, 3, 2, {3});
  for (Index j = 0; j < 3; ++j) inst.data.mask(1, j) = 0;
  inst.data = inst.data.with_mask(inst.data.mask);
  const Hyperparameters hyper(inst.sigma, 1.0);
  const Vector t = inst.state.theta.row(1).transpose();
  const Vector g = grad_theta(inst.data, inst.state, hyper, 1);
  const Vector expected = -(inst.sigma.inverse() * t);
  for (Index k = 0; k < 2; ++k) CHECK(g(k) == doctest::Approx(expected(k)).epsilon(1e-10));
}

TEST_CASE("zero loadings give zero factor gradient from the likelihood") {
  std::mt19937_64 rng(13);
  auto inst = testing::random_instance(rng, 5, 4, 2, {2});
  inst.state.loadings.setZero();
  const auto hyper = Hyperparameters::identity(2, 1.0);
  const Vector t = inst.state.theta.row(0).transpose();
  const Vector g = grad_theta(inst.data, inst.state, hyper, 0);
  for (Index k = 0; k < 2; ++k) CHECK(g(k) == doctest::Approx(-t(k)).epsilon(1e-14));
}
