#include "bjme/model.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace bjme {

namespace {

void require_ordered(const Vector& d_j) {
  if (d_j.size() < 1) throw std::invalid_argument("intercept vector must be non-empty");
  for (Index c = 1; c < d_j.size(); ++c)
    if (!(d_j(c - 1) > d_j(c))) throw std::invalid_argument("intercepts must be strictly decreasing");
}

}  // namespace

bool ModelState::intercepts_ordered() const {
  for (const auto& d : intercepts) {
    if (d.size() < 1) return false;
    for (Index c = 1; c < d.size(); ++c)
      if (!(d(c - 1) > d(c))) return false;
  }
  return true;
}

bool ModelState::all_finite() const {
  if (!theta.allFinite() || !loadings.allFinite()) return false;
  for (const auto& d : intercepts)
    if (!d.allFinite()) return false;
  return true;
}

void ModelState::validate(const ResponseData& data) const {
  if (theta.rows() != data.n_respondents())
    throw std::invalid_argument("theta has wrong number of rows");
  if (loadings.rows() != data.n_items()) throw std::invalid_argument("loadings have wrong number of rows");
  if (theta.cols() != loadings.cols()) throw std::invalid_argument("theta and loadings differ in K");
  if (static_cast<Index>(intercepts.size()) != data.n_items())
    throw std::invalid_argument("one intercept vector per item required");
  for (Index j = 0; j < data.n_items(); ++j)
    if (intercepts[j].size() != data.categories[j] - 1)
      throw std::invalid_argument("item " + std::to_string(j) + " needs C_j - 1 intercepts");
  if (!intercepts_ordered()) throw std::invalid_argument("intercepts must be strictly decreasing");
  if (!all_finite()) throw std::invalid_argument("model state has non-finite entries");
}

Hyperparameters::Hyperparameters(Matrix sigma_theta, double lambda, double sigma_d_sq)
    : sigma_theta_(std::move(sigma_theta)), lambda_(lambda), sigma_d_sq_(sigma_d_sq) {
  if (sigma_theta_.rows() < 1 || sigma_theta_.rows() != sigma_theta_.cols())
    throw std::invalid_argument("sigma_theta must be a non-empty square matrix");
  if (!sigma_theta_.isApprox(sigma_theta_.transpose(), 1e-12))
    throw std::invalid_argument("sigma_theta must be symmetric");
  Eigen::LLT<Matrix> llt(sigma_theta_);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("sigma_theta must be positive definite");
  const Index K = sigma_theta_.rows();
  sigma_theta_inv_ = llt.solve(Matrix::Identity(K, K));
  sigma_theta_inv_ = 0.5 * (sigma_theta_inv_ + sigma_theta_inv_.transpose()).eval();
  log_det_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) throw std::invalid_argument("lambda must be >= 0");
  if (!(sigma_d_sq_ > 0.0) || !std::isfinite(sigma_d_sq_))
    throw std::invalid_argument("sigma_d_sq must be > 0");
}

Hyperparameters Hyperparameters::identity(Index n_factors, double lambda, double sigma_d_sq) {
  return Hyperparameters(Matrix::Identity(n_factors, n_factors), lambda, sigma_d_sq);
}

Hyperparameters Hyperparameters::with_lambda(double lambda) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  Hyperparameters out = *this;
  out.lambda_ = lambda;
  return out;
}

Vector cumulative_probs(const Vector& theta_i, const Vector& a_j, const Vector& d_j) {
  require_ordered(d_j);
  const double eta = theta_i.dot(a_j);
  const Index C = d_j.size() + 1;
  Vector p(C + 1);
  p(0) = 1.0;
  for (Index c = 1; c < C; ++c) p(c) = inverse_logit(eta + d_j(c - 1));
  p(C) = 0.0;
  return p;
}

double category_prob(const Vector& theta_i, const Vector& a_j, const Vector& d_j, int c) {
  require_ordered(d_j);
  if (c < 0 || c > d_j.size()) throw std::out_of_range("category out of range");
  return cell::prob(theta_i.dot(a_j), d_j, c);
}

double log_likelihood(const ResponseData& data, const ModelState& state) {
  double total = 0.0;
  for (Index i = 0; i < data.n_respondents(); ++i) {
    for (Index j = 0; j < data.n_items(); ++j) {
      if (!data.observed(i, j)) continue;
      const double eta = state.theta.row(i).dot(state.loadings.row(j));
      total += cell::log_prob(eta, state.intercepts[j], data.responses(i, j));
    }
  }
  return total;
}

double log_prior_theta(const Vector& theta_i, const Hyperparameters& hyper) {
  const double K = static_cast<double>(theta_i.size());
  return -0.5 * K * std::log(2.0 * std::numbers::pi) - 0.5 * hyper.log_det_sigma_theta() -
         0.5 * theta_i.dot(hyper.sigma_theta_inv() * theta_i);
}

double log_prior_a(const Vector& a_j, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("log_prior_a requires lambda > 0");
  return static_cast<double>(a_j.size()) * std::log(lambda / 2.0) - lambda * a_j.lpNorm<1>();
}

double log_prior_d(const Vector& d_j, double sigma_d_sq) {
  if (!(sigma_d_sq > 0.0)) throw std::invalid_argument("sigma_d_sq must be > 0");
  const double n = static_cast<double>(d_j.size());
  return -0.5 * n * std::log(2.0 * std::numbers::pi * sigma_d_sq) - d_j.squaredNorm() / (2.0 * sigma_d_sq);
}

double loadings_prior_term(const Vector& a_j, double lambda) {
  return lambda > 0.0 ? log_prior_a(a_j, lambda) : 0.0;
}

double objective(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper) {
  double total = log_likelihood(data, state);
  for (Index i = 0; i < state.n_respondents(); ++i)
    total += log_prior_theta(state.theta.row(i).transpose(), hyper);
  for (Index j = 0; j < state.n_items(); ++j) {
    total += loadings_prior_term(state.loadings.row(j).transpose(), hyper.lambda());
    total += log_prior_d(state.intercepts[j], hyper.sigma_d_sq());
  }
  return total;
}

double respondent_objective(const ResponseData& data, const ModelState& state,
                            const Hyperparameters& hyper, Index i, const Vector& theta_i) {
  double total = log_prior_theta(theta_i, hyper);
  for (Index j = 0; j < data.n_items(); ++j) {
    if (!data.observed(i, j)) continue;
    const double eta = state.loadings.row(j).dot(theta_i);
    total += cell::log_prob(eta, state.intercepts[j], data.responses(i, j));
  }
  return total;
}

double item_loglik(const ResponseData& data, const ModelState& state, Index j, const Vector& a_j,
                   const Vector& d_j) {
  double total = 0.0;
  for (Index i = 0; i < data.n_respondents(); ++i) {
    if (!data.observed(i, j)) continue;
    const double eta = state.theta.row(i).dot(a_j);
    total += cell::log_prob(eta, d_j, data.responses(i, j));
  }
  return total;
}

}  // namespace bjme
