#include "bjme/gradients.hpp"

#include <stdexcept>

namespace bjme {

Vector to_delta(const Vector& d_j) {
  if (d_j.size() < 1) throw std::invalid_argument("intercept vector must be non-empty");
  Vector delta(d_j.size());
  delta(0) = d_j(0);
  for (Index c = 1; c < d_j.size(); ++c) {
    const double gap = d_j(c - 1) - d_j(c);
    if (!(gap > 0.0)) throw std::invalid_argument("intercepts must be strictly decreasing");
    delta(c) = std::log(gap);
  }
  return delta;
}

Vector to_intercepts(const Vector& delta_j) {
  Vector d(delta_j.size());
  if (delta_j.size() == 0) return d;
  d(0) = delta_j(0);
  for (Index c = 1; c < delta_j.size(); ++c) d(c) = d(c - 1) - std::exp(delta_j(c));
  return d;
}

Vector grad_theta_at(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                     Index i, const Vector& theta_i) {
  Vector g = -(hyper.sigma_theta_inv() * theta_i);
  for (Index j = 0; j < data.n_items(); ++j) {
    if (!data.observed(i, j)) continue;
    const auto a_j = state.loadings.row(j);
    const double w = cell::derivs(a_j.dot(theta_i), state.intercepts[j], data.responses(i, j)).eta;
    g += w * a_j.transpose();
  }
  return g;
}

Vector grad_theta(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                  Index i) {
  return grad_theta_at(data, state, hyper, i, state.theta.row(i).transpose());
}

Vector grad_a_loglik_at(const ResponseData& data, const ModelState& state, Index j, const Vector& a_j) {
  Vector g = Vector::Zero(a_j.size());
  const Vector& d_j = state.intercepts[j];
  for (Index i = 0; i < data.n_respondents(); ++i) {
    if (!data.observed(i, j)) continue;
    const auto theta_i = state.theta.row(i);
    const double w = cell::derivs(theta_i.dot(a_j), d_j, data.responses(i, j)).eta;
    g += w * theta_i.transpose();
  }
  return g;
}

Vector grad_a_loglik(const ResponseData& data, const ModelState& state, Index j) {
  return grad_a_loglik_at(data, state, j, state.loadings.row(j).transpose());
}

Vector grad_intercepts(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                       Index j, const Vector& a_j, const Vector& d_j) {
  const Index n_thr = d_j.size();
  Vector g = -d_j / hyper.sigma_d_sq();
  for (Index i = 0; i < data.n_respondents(); ++i) {
    if (!data.observed(i, j)) continue;
    const int y = data.responses(i, j);
    const auto dv = cell::derivs(state.theta.row(i).dot(a_j), d_j, y);
    if (y >= 1) g(y - 1) += dv.upper;
    if (y < n_thr) g(y) += dv.lower;
  }
  return g;
}

Vector grad_delta_at(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                     Index j, const Vector& a_j, const Vector& delta_j) {
  const Vector d_j = to_intercepts(delta_j);
  const Vector gd = grad_intercepts(data, state, hyper, j, a_j, d_j);
  const Index n = gd.size();
  Vector g(n);
  // d_c = delta_1 - sum_{c'=2..c} exp(delta_c'): delta_c' moves every d_c
  // with c >= c', so its partial collects the trailing sum.
  double trailing = 0.0;
  for (Index c = n - 1; c >= 1; --c) {
    trailing += gd(c);
    g(c) = -std::exp(delta_j(c)) * trailing;
  }
  g(0) = gd.sum();
  return g;
}

Vector grad_delta(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                  Index j) {
  return grad_delta_at(data, state, hyper, j, state.loadings.row(j).transpose(),
                       to_delta(state.intercepts[j]));
}

}  // namespace bjme
