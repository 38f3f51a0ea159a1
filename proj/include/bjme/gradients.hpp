#pragma once

#include "bjme/model.hpp"

namespace bjme {

// Unconstrained intercept coordinates:
// delta = (d_1, log(d_1 - d_2), ..., log(d_{C-2} - d_{C-1})).
Vector to_delta(const Vector& d_j);
// Inverse map; any finite delta yields strictly decreasing intercepts.
Vector to_intercepts(const Vector& delta_j);

// Gradient of the objective with respect to theta_i: likelihood part over
// the observed items of row i minus Sigma_theta^{-1} theta_i.
Vector grad_theta(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                  Index i);
Vector grad_theta_at(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                     Index i, const Vector& theta_i);

// Likelihood-only gradient with respect to a_j. The L1 prior term is left to
// the proximal step.
Vector grad_a_loglik(const ResponseData& data, const ModelState& state, Index j);
Vector grad_a_loglik_at(const ResponseData& data, const ModelState& state, Index j, const Vector& a_j);

// Gradient of the objective with respect to the raw intercepts d_j
// (likelihood plus normal prior).
Vector grad_intercepts(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                       Index j, const Vector& a_j, const Vector& d_j);

// Gradient of the objective with respect to delta_j, chained from
// grad_intercepts through the inverse map.
Vector grad_delta(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                  Index j);
Vector grad_delta_at(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                     Index j, const Vector& a_j, const Vector& delta_j);

}  // namespace bjme
