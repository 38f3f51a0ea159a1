#pragma once

#include "bjme/optimizer.hpp"

// Phase sweeps of the alternating optimizer. Each sweep has a serial
// reference loop and an OpenMP version that splits the index range into
// equal contiguous blocks, one per thread. Writes go to disjoint rows.
namespace bjme::kernels {

int resolve_threads(int requested);

void theta_phase_serial(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                        const FitConfig& cfg);
void theta_phase_parallel(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                          const FitConfig& cfg);

// a_j is updated first and the intercept step is taken at the new a_j.
void item_phase_serial(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                       const FitConfig& cfg);
void item_phase_parallel(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                         const FitConfig& cfg);

// Objective with per-respondent partial sums reduced in row order, so the
// value does not depend on the thread count.
double objective_serial(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper);
double objective_parallel(const ResponseData& data, const ModelState& state,
                          const Hyperparameters& hyper, int threads);

inline void theta_phase(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                        const FitConfig& cfg) {
  if (cfg.execution == Execution::serial) theta_phase_serial(data, state, hyper, cfg);
  else theta_phase_parallel(data, state, hyper, cfg);
}

inline void item_phase(const ResponseData& data, ModelState& state, const Hyperparameters& hyper,
                       const FitConfig& cfg) {
  if (cfg.execution == Execution::serial) item_phase_serial(data, state, hyper, cfg);
  else item_phase_parallel(data, state, hyper, cfg);
}

inline double objective(const ResponseData& data, const ModelState& state, const Hyperparameters& hyper,
                        const FitConfig& cfg) {
  if (cfg.execution == Execution::serial) return objective_serial(data, state, hyper);
  return objective_parallel(data, state, hyper, cfg.threads);
}

}  // namespace bjme::kernels
