#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmqkd/decoy.hpp"

namespace mmqkd {

struct TrialConfig {
  std::uint64_t n = 2000;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 20240901;

  // serfling / phase
  double p_test = 0.5;
  double p_key = 0.5;
  double density = 0.5;  // fraction of ones in the adversarial string
  double gamma = 0.05;
  std::uint64_t min_stratum = 100;
  double error_rate = 0.05;  // IID channel error probability for the phase check

  // smallpovm / transfer
  double delta = 0.01;
  double eps_sq = 1e-2;  // c = gamma_bin(n, ., eps_sq); also the phase target
  std::vector<double> e_grid{0.05, 0.1, 0.2};
  int levels = 16;  // distinct click probabilities in the heterogeneous surrogates

  // decoy
  double markov_stay = 0.9;  // probability the photon number repeats
  double decoy_eps_sq = 1e-4;

  // Throws config_error.
  void validate() const;
};

struct VerifyCell {
  std::string label;
  std::uint64_t trials = 0;
  double empirical = 0.0;
  double bound = 0.0;
  double sigma = 0.0;
  bool asserted = true;  // false for strata below min_stratum
  bool pass = true;
};

// Headline numbers are those of the asserted cell with the least slack.
struct VerifyReport {
  std::string lemma;
  double empirical = 0.0;
  double bound = 0.0;
  double sigma = 0.0;
  bool pass = true;
  std::vector<VerifyCell> cells;
};

// sqrt(p(1-p)/trials)
double binomial_sigma(double freq, std::uint64_t trials);

// Key-set mean vs test-set mean on a fixed string, per realized (n_X, n_K).
VerifyReport verify_serfling(const TrialConfig& cfg);
// Independent clicks with p_i <= delta: all at delta, and spread over `levels` values in (0, delta].
VerifyReport verify_small_povm(const TrialConfig& cfg);
// Coupled click pairs with |p'_i - p_i| <= delta, one cell per e in e_grid.
VerifyReport verify_freq_transfer(const TrialConfig& cfg);
// Intensity tallies on a Markov-correlated photon-number sequence.
VerifyReport verify_decoy_hoeffding(const TrialConfig& cfg, const DecoyConfig& decoy);
// Key-round error rate against e_obs + gamma_serf on an IID channel.
VerifyReport verify_phase_bound(const TrialConfig& cfg);

}  // namespace mmqkd
