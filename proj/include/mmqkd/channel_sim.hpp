#pragma once

#include <array>
#include <cstdint>

#include "mmqkd/decoy.hpp"
#include "mmqkd/detector_model.hpp"

namespace mmqkd {

// Honest lossy channel with a polarization misalignment. The detectors are the
// nominal ones of `detector` (tolerances are ignored here).
struct ChannelSpec {
  double eta_ch = 1.0;
  double theta_deg = 0.0;
  DetectorSpec detector;
  double p_za = 0.5;
  double p_xa = 0.5;
  double p_zb = 0.5;
  double p_xb = 0.5;
  double p_zt = 0.05;  // fraction of Z-Z rounds used to estimate e_Z
  std::uint64_t n_total = 1'000'000'000'000ULL;

  // Throws config_error.
  void validate() const;
  DetectorSetting honest_setting() const;
};

// 10^(-dB/10)
double eta_from_loss_db(double loss_db);

// Bob's result in a matched-basis round, averaged over Alice's bit.
// Double clicks are assigned a random bit.
struct RoundOutcome {
  double none = 0.0;
  double correct = 0.0;
  double error = 0.0;
  double conclusive() const { return correct + error; }
};

// Exactly m photons leave Alice.
RoundOutcome outcome_given_photons(int m, Basis basis, const ChannelSpec& ch);
// Phase-randomized coherent state of mean photon number mu.
RoundOutcome outcome_given_intensity(double mu, Basis basis, const ChannelSpec& ch);

// Expected counts over n_total rounds.
Observations expected_observations(const ChannelSpec& ch, const DecoyConfig& cfg);

// True zero- and one-photon counts behind each announced class, summed over intensities.
struct PhotonTags {
  std::array<double, 2> x{};
  std::array<double, 2> x_err{};
  std::array<double, 2> k{};
};

struct SampledRun {
  Observations obs;
  PhotonTags tags;
};

// One multinomial draw of a full run. Deterministic in seed.
SampledRun sample_observations(const ChannelSpec& ch, const DecoyConfig& cfg, std::uint64_t seed);

}  // namespace mmqkd
