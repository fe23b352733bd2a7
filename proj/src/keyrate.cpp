#include "mmqkd/keyrate.hpp"

#include <cmath>

#include "mmqkd/error.hpp"

namespace mmqkd {

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw domain_error("binary_entropy needs x in [0,1]");
  if (x > 0.5) return 1.0;
  if (x == 0.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double lambda_ec_default(double n_key, double e_z, double f_ec) {
  if (!(n_key >= 0.0)) throw domain_error("n_key must be nonnegative");
  return f_ec * n_key * binary_entropy(e_z);
}

LambdaEc make_lambda_ec(double f_ec, bool transcript_bit) {
  if (!(f_ec >= 1.0)) throw config_error("f_ec must be at least 1");
  return [f_ec, transcript_bit](double n_key, double e_z) {
    return lambda_ec_default(n_key, e_z, f_ec) + (transcript_bit ? 1.0 : 0.0);
  };
}

double hashing_cost(const EpsilonBudget& budget) {
  return 2.0 * std::log2(1.0 / (2.0 * budget.eps_pa)) + std::log2(2.0 / budget.eps_ev);
}

namespace {

std::uint64_t floor_length(double raw) {
  if (!(raw > 0.0)) return 0;
  return static_cast<std::uint64_t>(std::floor(raw));
}

}  // namespace

KeyDecision key_length_single_photon(double e_obs, double n_test, double n_key, double e_z, const DeltaPair& deltas,
                                     const EpsilonBudget& budget, const LambdaEc& lambda_ec) {
  budget.validate();
  PhaseErrorQuery q;
  q.e_obs = e_obs;
  q.n_test = n_test;
  q.n_key = n_key;
  q.deltas = deltas;
  q.eps_a_sq = budget.eps_at_a * budget.eps_at_a;
  q.eps_b_sq = budget.eps_at_b * budget.eps_at_b;
  q.eps_c_sq = budget.eps_at_c * budget.eps_at_c;
  const PhaseBound b = bound_mismatch(q);

  KeyDecision d;
  d.phase_bound = b.value;
  d.lambda_ec = lambda_ec(n_key, e_z);
  d.feasible = !b.vacuous;
  if (d.feasible) {
    d.key_length = floor_length(n_key * (1.0 - binary_entropy(b.value)) - d.lambda_ec - hashing_cost(budget));
  }
  return d;
}

KeyDecision key_length_decoy(const Observations& obs, const DecoyConfig& cfg, const DeltaPair& deltas,
                             const EpsilonBudget& budget, const LambdaEc& lambda_ec) {
  KeyDecision d;
  d.decoy = bound_decoy_composed(obs, cfg, deltas, budget);
  d.phase_bound = d.decoy.phase_bound;
  d.lambda_ec = lambda_ec(obs.k.total(), obs.e_z);
  d.feasible = d.decoy.feasible && !d.decoy.vacuous;
  if (d.feasible) {
    d.key_length = floor_length(d.decoy.single_key_lower * (1.0 - binary_entropy(d.phase_bound)) - d.lambda_ec -
                                hashing_cost(budget));
  }
  return d;
}

}  // namespace mmqkd
