#pragma once

#include <cmath>
#include <vector>

#include "bjme/data.hpp"
#include "bjme/types.hpp"

namespace bjme {

// Factor scores (N x K), loadings (J x K) and per-item intercepts of length
// C_j - 1, strictly decreasing.
struct ModelState {
  RowMatrix theta;
  RowMatrix loadings;
  std::vector<Vector> intercepts;

  Index n_respondents() const { return theta.rows(); }
  Index n_items() const { return loadings.rows(); }
  Index n_factors() const { return loadings.cols(); }

  bool intercepts_ordered() const;
  bool all_finite() const;
  // Shapes against `data`, ordering and finiteness. Throws std::invalid_argument.
  void validate(const ResponseData& data) const;
};

// Fixed hyperparameters of the priors. Sigma_theta is plugged in, never
// estimated; its inverse and log-determinant are cached on construction.
class Hyperparameters {
 public:
  static constexpr double kDefaultSigmaDSq = 100.0 * 100.0;

  Hyperparameters(Matrix sigma_theta, double lambda, double sigma_d_sq = kDefaultSigmaDSq);
  static Hyperparameters identity(Index n_factors, double lambda,
                                  double sigma_d_sq = kDefaultSigmaDSq);

  const Matrix& sigma_theta() const { return sigma_theta_; }
  const Matrix& sigma_theta_inv() const { return sigma_theta_inv_; }
  double log_det_sigma_theta() const { return log_det_; }
  double lambda() const { return lambda_; }
  double sigma_d_sq() const { return sigma_d_sq_; }
  Index n_factors() const { return sigma_theta_.rows(); }

  Hyperparameters with_lambda(double lambda) const;

 private:
  Matrix sigma_theta_;
  Matrix sigma_theta_inv_;
  double log_det_ = 0.0;
  double lambda_ = 0.0;
  double sigma_d_sq_ = kDefaultSigmaDSq;
};

// Overflow-free logistic function.
inline double inverse_logit(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// sigma(z) * (1 - sigma(z)), the logistic density.
inline double logistic_density(double z) {
  const double e = std::exp(-std::abs(z));
  const double s = 1.0 + e;
  return e / (s * s);
}

// P(Y >= c) for c = 0..C_j; first entry exactly 1, last exactly 0.
Vector cumulative_probs(const Vector& theta_i, const Vector& a_j, const Vector& d_j);

// P(Y = c). Evaluated as a difference of logistic values in a form that
// keeps full relative precision in both tails; not floored.
double category_prob(const Vector& theta_i, const Vector& a_j, const Vector& d_j, int c);

// Cell-level primitives on the linear predictor eta = theta_i' a_j.
namespace cell {

// Unfloored P(Y = y | eta, d).
inline double prob(double eta, const Vector& d, int y) {
  const Index n_thr = d.size();  // C - 1
  if (y == 0) return inverse_logit(-(eta + d(0)));
  if (y == n_thr) return inverse_logit(eta + d(n_thr - 1));
  const double upper = eta + d(y - 1);  // z_y
  const double lower = eta + d(y);      // z_{y+1} < z_y
  return inverse_logit(upper) * inverse_logit(-lower) * -std::expm1(lower - upper);
}

inline double log_prob(double eta, const Vector& d, int y) {
  return std::log(std::max(prob(eta, d, y), kProbFloor));
}

// d/d eta of log P(Y = y), plus the two intercept partials:
// d/d d_y (when y >= 1) and d/d d_{y+1} (when y + 1 <= C - 1).
struct Derivs {
  double eta;
  double upper;  // partial w.r.t. d_y      (index y - 1 in d)
  double lower;  // partial w.r.t. d_{y+1}  (index y in d)
};

inline Derivs derivs(double eta, const Vector& d, int y) {
  const Index n_thr = d.size();
  const double p = std::max(prob(eta, d, y), kProbFloor);
  const double q_upper = y == 0 ? 0.0 : logistic_density(eta + d(y - 1));
  const double q_lower = y == n_thr ? 0.0 : logistic_density(eta + d(y));
  return {(q_upper - q_lower) / p, q_upper / p, -q_lower / p};
}

}  // namespace cell

// Sum of floored log category probabilities over observed cells.
double log_likelihood(const ResponseData& data, const ModelState& state);

double log_prior_theta(const Vector& theta_i, const Hyperparameters& hyper);
// Requires lambda > 0.
double log_prior_a(const Vector& a_j, double lambda);
double log_prior_d(const Vector& d_j, double sigma_d_sq);

// Loadings prior term used inside the objective: log_prior_a when lambda > 0,
// zero for lambda == 0 (flat prior, no shrinkage).
double loadings_prior_term(const Vector& a_j, double lambda);

// Log posterior kernel: likelihood plus all three prior families.
double objective(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper);

// Partial objectives touched by one block update.
double respondent_objective(const ResponseData& data, const ModelState& state,
                            const Hyperparameters& hyper, Index i, const Vector& theta_i);
double item_loglik(const ResponseData& data, const ModelState& state, Index j, const Vector& a_j,
                   const Vector& d_j);

}  // namespace bjme
