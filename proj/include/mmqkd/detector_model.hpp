#pragma once

#include <array>
#include <cstdint>

#include "mmqkd/linalg.hpp"

namespace mmqkd {

// Nominal detector characterization with relative tolerances.
struct DetectorSpec {
  double eta_det = 0.7;
  double d_det = 1e-6;
  double delta_eta = 0.0;
  double delta_dc = 0.0;

  // Throws config_error when the tolerance box leaves the physical range.
  void validate() const;

  double eta_min() const { return eta_det * (1.0 - delta_eta); }
  double eta_max() const { return eta_det * (1.0 + delta_eta); }
  double d_min() const { return d_det * (1.0 - delta_dc); }
  double d_max() const { return d_det * (1.0 + delta_dc); }
  double eta_ratio() const { return eta_min() / eta_max(); }
};

struct DeltaPair {
  double delta1 = 0.0;
  double delta2 = 0.0;
  // set when d_min = 0: delta1 is pinned at 4 and no key can be certified
  bool degenerate = false;
};

// Worst case over the tolerance box, delta1 <= 4, delta2 <= 1.
DeltaPair closed_form_deltas(const DetectorSpec& spec);

enum Basis : int { kZ = 0, kX = 1 };

// Efficiencies and dark-count probabilities indexed [basis][bit].
struct DetectorSetting {
  std::array<std::array<double, 2>, 2> eta{};
  std::array<std::array<double, 2>, 2> dc{};

  static DetectorSetting uniform(double eta, double dc);
  double eta_max() const;
  double eta_min() const;
  double d_max() const;
  double d_min() const;
  // common loss moved into the channel: every eta divided by eta_max()
  DetectorSetting renormalized() const;
};

inline constexpr int kDefaultPhotonCutoff = 10;
inline constexpr int kHardPhotonLimit = 64;
inline constexpr double kPinvTolerance = 1e-12;

// Small Wigner d-matrix d^{j}(beta) for j = two_j / 2. Row/column r <-> m = r - j.
Mat wigner_small_d(int two_j, double beta);

// N-photon representation of the 50/50 mode rotation. Column k is |k, N-k>_X
// written in the Z-mode Fock basis {|r, N-r>_Z}.
Mat mode_rotation(int photons);

// Operators of one basis on the 2(N+1)-dim block (Alice qubit (x) Bob N-photon),
// all expressed in Alice's computational basis and Bob's Z-mode Fock basis.
// Index: a * (N + 1) + r, r = photons in Z-mode 0.
struct BasisPovm {
  Mat bob_inconclusive;  // Γ^b_⊥ on Bob, (N+1) x (N+1)
  Mat bob_zero;
  Mat bob_one;
  Mat bob_double;
  Mat inconclusive;      // I_A (x) Γ^b_⊥
  Mat error;             // Γ^{b,b}_≠
  Mat no_error;          // Γ^{b,b}_=
  Mat filter_con;        // F^{(b)}_con = I - inconclusive
  Mat second_error;      // √F_con^+ Γ_≠ √F_con^+
  Mat second_no_error;   // √F_con^+ Γ_= √F_con^+ + I - Π
  Mat filter_prime_con;  // √F̃^+ F_con √F̃^+ + I - Π_F̃
};

struct PovmBlock {
  int photons = 0;
  double f_tilde_value = 0.0;  // F̃ is this scalar times identity on the block
  Mat f_tilde;
  std::array<BasisPovm, 2> basis;
};

// F̃ uses setting.eta_max() / setting.d_max().
PovmBlock build_block_povms(int photons, const DetectorSetting& setting,
                            int cutoff = kDefaultPhotonCutoff);
// F̃ from explicit extremes (must dominate the setting).
PovmBlock build_block_povms(int photons, const DetectorSetting& setting, double f_eta_max,
                            double f_d_max, int cutoff = kDefaultPhotonCutoff);

struct BlockDeltas {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

// delta1 = 2||√F'Z G^X_≠ √F'Z - √F'X G^X_≠ √F'X||, delta2 = ||I - F'Z||
BlockDeltas block_deltas(const PovmBlock& block);

// Max of block_deltas over N <= n_max for one setting (after renormalization if asked).
BlockDeltas setting_deltas(const DetectorSetting& setting, int n_max, bool renormalize = true);

struct OracleOptions {
  int n_max = kDefaultPhotonCutoff;
  int interior_samples = 32;
  std::uint64_t seed = 0x5eed;
  bool renormalize = true;
};

// Numeric delta pair: max over the 2^8 corners of the (eta, dc) box across both
// bases plus Latin-hypercube interior points.
DeltaPair oracle_deltas(const DetectorSpec& spec, const OracleOptions& options = {});

}  // namespace mmqkd
