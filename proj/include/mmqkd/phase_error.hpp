#pragma once

#include "mmqkd/decoy.hpp"
#include "mmqkd/detector_model.hpp"
#include "mmqkd/epsilon.hpp"

namespace mmqkd {

struct PhaseErrorQuery {
  double e_obs = 0.0;
  double n_test = 0.0;
  double n_key = 0.0;
  DeltaPair deltas;
  double eps_a_sq = 1e-24;
  double eps_b_sq = 1e-24;
  double eps_c_sq = 1e-24;
};

struct PhaseBound {
  double value = 1.0;
  bool vacuous = false;  // carries no information: value is 1
};

// min(1, e_obs + gamma_serf). Zero counts give 1.
double bound_perfect(double e_obs, double n_test, double n_key, double eps_sq);

// (e + γ_serf^a(n_X,n_K) + δ1 + γ_bin^b(n_K,δ1)) / (1 - δ2 - γ_bin^c(n_K,δ2)), capped at 1.
// Non-integer n_key is floored for the γ_bin terms.
PhaseBound bound_mismatch(const PhaseErrorQuery& q);

struct ComposedBound {
  DecoyBounds x;
  DecoyBounds x_err;
  DecoyBounds k;
  double e1_upper = 1.0;
  double phase_bound = 1.0;
  double single_key_lower = 0.0;
  bool feasible = false;
  bool vacuous = true;
};

// Decoy bounds for X, X_≠, K at eps_at_d^2 chained into bound_mismatch.
ComposedBound bound_decoy_composed(const Observations& obs, const DecoyConfig& cfg, const DeltaPair& deltas,
                                   const EpsilonBudget& budget);

}  // namespace mmqkd
