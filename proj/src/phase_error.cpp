#include "mmqkd/phase_error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "mmqkd/error.hpp"
#include "mmqkd/stat_bounds.hpp"

namespace mmqkd {

void EpsilonBudget::validate() const {
  for (double e : {eps_at_a, eps_at_b, eps_at_c, eps_at_d, eps_ev, eps_pa}) {
    if (!(e > 0.0 && e < 1.0)) throw config_error("every epsilon component must lie in (0,1)");
  }
}

double EpsilonBudget::eps_at_single() const {
  return std::sqrt(eps_at_a * eps_at_a + eps_at_b * eps_at_b + eps_at_c * eps_at_c);
}

double EpsilonBudget::eps_at_decoy() const {
  return std::sqrt(9.0 * eps_at_d * eps_at_d + eps_at_a * eps_at_a + eps_at_b * eps_at_b +
                   eps_at_c * eps_at_c);
}

double EpsilonBudget::total_single() const { return 2.0 * eps_at_single() + eps_pa + eps_ev; }

double EpsilonBudget::total_decoy() const { return 2.0 * eps_at_decoy() + eps_pa + eps_ev; }

double bound_perfect(double e_obs, double n_test, double n_key, double eps_sq) {
  if (!(e_obs >= 0.0 && e_obs <= 1.0)) throw domain_error("e_obs must lie in [0,1]");
  if (!(n_test > 0.0) || !(n_key > 0.0)) return 1.0;
  return std::min(1.0, e_obs + gamma_serf(n_test, n_key, eps_sq));
}

PhaseBound bound_mismatch(const PhaseErrorQuery& q) {
  if (!(q.e_obs >= 0.0 && q.e_obs <= 1.0)) throw domain_error("e_obs must lie in [0,1]");
  const PhaseBound vacuous{1.0, true};
  if (q.deltas.degenerate) return vacuous;
  if (!(q.n_test > 0.0) || !(q.n_key >= 1.0)) return vacuous;
  const double d1 = q.deltas.delta1;
  const double d2 = q.deltas.delta2;
  if (!(d1 >= 0.0) || !(d2 >= 0.0)) throw domain_error("deltas must be nonnegative");
  if (d1 >= 1.0 || d2 >= 1.0) return vacuous;

  const auto nk = static_cast<std::uint64_t>(std::floor(q.n_key));
  // den lives on the grid 1 - k/n_K, so anything under half a step is zero or negative
  const double den = 1.0 - d2 - gamma_bin(nk, d2, q.eps_c_sq);
  if (!(den > 0.5 / static_cast<double>(nk))) return vacuous;
  const double num = q.e_obs + gamma_serf(q.n_test, q.n_key, q.eps_a_sq) + d1 + gamma_bin(nk, d1, q.eps_b_sq);
  return {std::min(1.0, num / den), false};
}

ComposedBound bound_decoy_composed(const Observations& obs, const DecoyConfig& cfg, const DeltaPair& deltas,
                                   const EpsilonBudget& budget) {
  budget.validate();
  const double eps_d_sq = budget.eps_at_d * budget.eps_at_d;
  ComposedBound out;
  out.x = decoy_bounds(obs.x, cfg, eps_d_sq);
  out.x_err = decoy_bounds(obs.x_err, cfg, eps_d_sq);
  out.k = decoy_bounds(obs.k, cfg, eps_d_sq);
  out.single_key_lower = out.k.single_lower;

  out.feasible = !out.x.infeasible && !out.x_err.infeasible && !out.k.infeasible &&
                 out.x.single_lower > 0.0 && out.k.single_lower > 0.0;
  if (!out.feasible) return out;

  out.e1_upper = std::clamp(out.x_err.single_upper / out.x.single_lower, 0.0, 1.0);
  PhaseErrorQuery q;
  q.e_obs = out.e1_upper;
  q.n_test = out.x.single_lower;
  q.n_key = out.k.single_lower;
  q.deltas = deltas;
  q.eps_a_sq = budget.eps_at_a * budget.eps_at_a;
  q.eps_b_sq = budget.eps_at_b * budget.eps_at_b;
  q.eps_c_sq = budget.eps_at_c * budget.eps_at_c;
  const PhaseBound b = bound_mismatch(q);
  out.phase_bound = b.value;
  out.vacuous = b.vacuous;
  return out;
}

}  // namespace mmqkd
