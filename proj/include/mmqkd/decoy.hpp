#pragma once

#include <array>

namespace mmqkd {

// Three intensities mu[0] > mu[1] + mu[2], mu[1] > mu[2] >= 0, chosen with prob[k].
struct DecoyConfig {
  std::array<double, 3> mu{0.9, 0.1, 0.0};
  std::array<double, 3> prob{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  // Throws config_error.
  void validate() const;
};

// Per-intensity counts of one outcome class (X, X_≠ or K). Real-valued so that
// expected counts pass through unchanged.
struct OutcomeCounts {
  std::array<double, 3> n{};
  double total() const { return n[0] + n[1] + n[2]; }
};

// Everything the parties announce in one decoy run.
struct Observations {
  OutcomeCounts x;      // conclusive X-basis rounds
  OutcomeCounts x_err;  // X-basis errors
  OutcomeCounts k;      // key rounds
  double e_z = 0.0;     // error rate on the Z test rounds
  double n_z_test = 0.0;
};

inline constexpr int kPhotonSeriesCutoff = 50;

// p_{m|mu} = e^-mu mu^m / m!
double photon_given_intensity(int m, double mu);

// tau_m = sum_k p_k p_{m|mu_k}
double tau(int m, const DecoyConfig& cfg);

// p_{mu_k|m} = p_k p_{m|mu_k} / tau_m
double intensity_given_photon(int k, int m, const DecoyConfig& cfg);

struct ShiftedCounts {
  std::array<double, 3> minus{};
  std::array<double, 3> plus{};
};

// n^{mu_k,±} = (e^{mu_k} / p_k)(n^{mu_k} ± t), t = hoeffding_decoy_dev(n_O, eps_sq); minus clamped at 0.
ShiftedCounts shifted_counts(const OutcomeCounts& counts, const DecoyConfig& cfg, double eps_sq);

// All three bounds clamped to [0, n_O].
double bound_vacuum_lower(const OutcomeCounts& counts, const DecoyConfig& cfg, double eps_sq);
double bound_single_lower(const OutcomeCounts& counts, const DecoyConfig& cfg, double eps_sq);
double bound_single_upper(const OutcomeCounts& counts, const DecoyConfig& cfg, double eps_sq);

struct DecoyBounds {
  double vacuum_lower = 0.0;
  double single_lower = 0.0;
  double single_upper = 0.0;
  bool infeasible = false;  // single_lower > single_upper
};

DecoyBounds decoy_bounds(const OutcomeCounts& counts, const DecoyConfig& cfg, double eps_sq);

}  // namespace mmqkd
