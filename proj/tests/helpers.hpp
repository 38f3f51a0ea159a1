#pragma once

#include <functional>
#include <random>
#include <vector>

#include "bjme/model.hpp"

namespace bjme::testing {

struct Instance {
  ResponseData data;
  ModelState state;
  Matrix sigma;
};

// Random small problem with responses drawn independently of the state, an
// optional fraction of missing cells, and a random SPD covariance.
inline Instance random_instance(std::mt19937_64& rng, Index n, Index J, Index K,
                                const std::vector<int>& category_choices, double missing = 0.0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  Instance inst;
  inst.data.responses = IntMatrix::Zero(n, J);
  inst.data.mask = MaskMatrix::Ones(n, J);
  inst.data.categories.resize(J);
  for (Index j = 0; j < J; ++j)
    inst.data.categories[j] = category_choices[rng() % category_choices.size()];
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < J; ++j) {
      if (unit(rng) < missing) {
        inst.data.mask(i, j) = 0;
        continue;
      }
      inst.data.responses(i, j) = static_cast<int>(rng() % inst.data.categories[j]);
    }
  inst.state.theta = RowMatrix(n, K);
  inst.state.loadings = RowMatrix(J, K);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < K; ++k) inst.state.theta(i, k) = normal(rng);
  for (Index j = 0; j < J; ++j)
    for (Index k = 0; k < K; ++k) inst.state.loadings(j, k) = normal(rng);
  for (Index j = 0; j < J; ++j) {
    Vector d(inst.data.categories[j] - 1);
    double cur = 1.0 + normal(rng);
    for (Index c = 0; c < d.size(); ++c) {
      d(c) = cur;
      cur -= 0.3 + unit(rng);
    }
    inst.state.intercepts.push_back(d);
  }
  Matrix B = Matrix::Random(K, K);
  inst.sigma = B * B.transpose() + Matrix::Identity(K, K);
  return inst;
}

// Central finite difference of f at x.
inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                 double h = 1e-5) {
  Vector g(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    Vector hi = x, lo = x;
    hi(k) += h;
    lo(k) -= h;
    g(k) = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

// Relative error per component with an absolute fallback near zero.
inline bool gradients_agree(const Vector& analytic, const Vector& numeric, double rel = 1e-5,
                            double abs_floor = 1e-8) {
  for (Index k = 0; k < analytic.size(); ++k) {
    const double diff = std::abs(analytic(k) - numeric(k));
    const double scale = std::max(std::abs(analytic(k)), std::abs(numeric(k)));
    if (diff > abs_floor && diff > rel * scale) return false;
  }
  return true;
}

}  // namespace bjme::testing
