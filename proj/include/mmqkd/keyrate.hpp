#pragma once

#include <cstdint>
#include <functional>

#include "mmqkd/decoy.hpp"
#include "mmqkd/detector_model.hpp"
#include "mmqkd/epsilon.hpp"
#include "mmqkd/phase_error.hpp"

namespace mmqkd {

struct KeyDecision {
  std::uint64_t key_length = 0;
  double lambda_ec = 0.0;
  double phase_bound = 1.0;
  bool feasible = false;
  ComposedBound decoy;  // filled by key_length_decoy only
};

// h(x) for x <= 1/2, exactly 1 above.
double binary_entropy(double x);

// f_ec * n_key * h(e_z)
double lambda_ec_default(double n_key, double e_z, double f_ec);

// Bits of error-correction leakage as a function of (n_key, e_z).
using LambdaEc = std::function<double(double n_key, double e_z)>;

// f_ec n_K h(e_Z), plus one bit when transcript_bit is set.
LambdaEc make_lambda_ec(double f_ec = 1.16, bool transcript_bit = false);

// 2 log2(1/(2 eps_PA)) + log2(2/eps_EV)
double hashing_cost(const EpsilonBudget& budget);

KeyDecision key_length_single_photon(double e_obs, double n_test, double n_key, double e_z, const DeltaPair& deltas,
                                     const EpsilonBudget& budget, const LambdaEc& lambda_ec);

// Key from the single-photon key rounds only; lambda_ec sees the total n_K and e_Z.
KeyDecision key_length_decoy(const Observations& obs, const DecoyConfig& cfg, const DeltaPair& deltas,
                             const EpsilonBudget& budget, const LambdaEc& lambda_ec);

}  // namespace mmqkd
