#pragma once

namespace mmqkd {

// Failure probabilities (not squared). Defaults follow the reference scenario.
struct EpsilonBudget {
  double eps_at_a = 1e-12;
  double eps_at_b = 1e-12;
  double eps_at_c = 1e-12;
  double eps_at_d = 1e-12;
  double eps_ev = 1e-12;
  double eps_pa = 1e-12;

  // Throws config_error unless every component lies in (0,1).
  void validate() const;

  // sqrt(eps_a^2 + eps_b^2 + eps_c^2)
  double eps_at_single() const;
  // sqrt(9 eps_d^2 + eps_a^2 + eps_b^2 + eps_c^2)
  double eps_at_decoy() const;
  // 2 eps_AT + eps_PA + eps_EV
  double total_single() const;
  double total_decoy() const;
};

}  // namespace mmqkd
