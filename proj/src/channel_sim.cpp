#include "mmqkd/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mmqkd/error.hpp"
#include "sampling.hpp"

namespace mmqkd {

using detail::draw_multinomial;

namespace {

bool is_prob(double p) { return p > 0.0 && p < 1.0; }

// Per-detector mean-photon fractions for Alice's bit a: (to detector a, to detector 1-a).
struct Routing {
  std::array<double, 2> rate{};  // indexed by detector
  std::array<double, 2> dark{};
};

Routing routing(int bit, Basis basis, const ChannelSpec& ch) {
  const DetectorSetting s = ch.honest_setting();
  const double th = ch.theta_deg * std::numbers::pi / 180.0;
  const double c2 = std::cos(th) * std::cos(th);
  const double s2 = std::sin(th) * std::sin(th);
  Routing r;
  for (int j = 0; j < 2; ++j) {
    const double frac = (j == bit) ? c2 : s2;
    r.rate[j] = ch.eta_ch * s.eta[basis][j] * frac;
    r.dark[j] = s.dc[basis][j];
  }
  return r;
}

// Click probabilities of each detector alone and of "at least one".
RoundOutcome classify(int bit, double click0, double click1, double click_any) {
  const double only0 = click_any - click1;
  const double only1 = click_any - click0;
  const double both = click0 + click1 - click_any;
  const std::array<double, 2> only{only0, only1};
  RoundOutcome o;
  o.none = 1.0 - click_any;
  o.correct = only[bit] + 0.5 * both;
  o.error = only[1 - bit] + 0.5 * both;
  return o;
}

RoundOutcome average_bits(const RoundOutcome& a, const RoundOutcome& b) {
  return {0.5 * (a.none + b.none), 0.5 * (a.correct + b.correct), 0.5 * (a.error + b.error)};
}

// Smallest M with Poisson(mu) mass above M below 1e-20, capped.
int photon_cutoff(double mu) {
  double cum = 0.0;
  for (int m = 0; m <= kPhotonSeriesCutoff; ++m) {
    cum += photon_given_intensity(m, mu);
    if (1.0 - cum < 1e-20) return m;
  }
  return kPhotonSeriesCutoff;
}

}  // namespace

void ChannelSpec::validate() const {
  if (!(eta_ch > 0.0 && eta_ch <= 1.0)) throw config_error("channel.eta_ch must lie in (0,1]");
  if (!std::isfinite(theta_deg)) throw config_error("channel.theta_deg must be finite");
  detector.validate();
  if (detector.eta_det > 1.0) throw config_error("detector.eta_det must be at most 1");
  for (double p : {p_za, p_xa, p_zb, p_xb, p_zt}) {
    if (!is_prob(p)) throw config_error("channel probabilities must lie in (0,1)");
  }
  if (std::fabs(p_za + p_xa - 1.0) > 1e-12 || std::fabs(p_zb + p_xb - 1.0) > 1e-12) {
    throw config_error("basis probabilities must sum to 1 for each party");
  }
  if (n_total == 0) throw config_error("channel.n_total must be positive");
}

DetectorSetting ChannelSpec::honest_setting() const { return DetectorSetting::uniform(detector.eta_det, detector.d_det); }

double eta_from_loss_db(double loss_db) {
  if (!std::isfinite(loss_db) || loss_db < 0.0) throw config_error("loss must be a nonnegative number of dB");
  return std::pow(10.0, -loss_db / 10.0);
}

RoundOutcome outcome_given_photons(int m, Basis basis, const ChannelSpec& ch) {
  if (m < 0) throw domain_error("photon number must be nonnegative");
  std::array<RoundOutcome, 2> per_bit;
  for (int bit = 0; bit < 2; ++bit) {
    const Routing r = routing(bit, basis, ch);
    const double md = static_cast<double>(m);
    const double l0 = std::log1p(-r.dark[0]) + md * std::log1p(-r.rate[0]);
    const double l1 = std::log1p(-r.dark[1]) + md * std::log1p(-r.rate[1]);
    const double lany =
        std::log1p(-r.dark[0]) + std::log1p(-r.dark[1]) + md * std::log1p(-(r.rate[0] + r.rate[1]));
    per_bit[bit] = classify(bit, -std::expm1(l0), -std::expm1(l1), -std::expm1(lany));
  }
  return average_bits(per_bit[0], per_bit[1]);
}

RoundOutcome outcome_given_intensity(double mu, Basis basis, const ChannelSpec& ch) {
  if (!(mu >= 0.0)) throw domain_error("intensity must be nonnegative");
  std::array<RoundOutcome, 2> per_bit;
  for (int bit = 0; bit < 2; ++bit) {
    const Routing r = routing(bit, basis, ch);
    // Poisson splitting makes the two detectors independent
    const double c0 = -std::expm1(std::log1p(-r.dark[0]) - mu * r.rate[0]);
    const double c1 = -std::expm1(std::log1p(-r.dark[1]) - mu * r.rate[1]);
    const double any = c0 + c1 - c0 * c1;
    per_bit[bit] = classify(bit, c0, c1, any);
  }
  return average_bits(per_bit[0], per_bit[1]);
}

Observations expected_observations(const ChannelSpec& ch, const DecoyConfig& cfg) {
  ch.validate();
  cfg.validate();
  const double n = static_cast<double>(ch.n_total);
  const double w_x = ch.p_xa * ch.p_xb;
  const double w_z = ch.p_za * ch.p_zb;
  Observations obs;
  double test_conc = 0.0;
  double test_err = 0.0;
  for (int k = 0; k < 3; ++k) {
    const RoundOutcome ox = outcome_given_intensity(cfg.mu[k], kX, ch);
    const RoundOutcome oz = outcome_given_intensity(cfg.mu[k], kZ, ch);
    const double nk = n * cfg.prob[k];
    obs.x.n[k] = nk * w_x * ox.conclusive();
    obs.x_err.n[k] = nk * w_x * ox.error;
    obs.k.n[k] = nk * w_z * (1.0 - ch.p_zt) * oz.conclusive();
    test_conc += nk * w_z * ch.p_zt * oz.conclusive();
    test_err += nk * w_z * ch.p_zt * oz.error;
  }
  obs.n_z_test = test_conc;
  obs.e_z = test_conc > 0.0 ? test_err / test_conc : 0.0;
  return obs;
}

SampledRun sample_observations(const ChannelSpec& ch, const DecoyConfig& cfg, std::uint64_t seed) {
  ch.validate();
  cfg.validate();
  std::mt19937_64 rng(seed);
  const double w_x = ch.p_xa * ch.p_xb;
  const double w_z = ch.p_za * ch.p_zb;
  enum Cell { kCellX, kCellKey, kCellTest, kCells };
  const std::array<double, kCells> cell_w{w_x, w_z * (1.0 - ch.p_zt), w_z * ch.p_zt};

  std::vector<double> probs;
  for (int k = 0; k < 3; ++k)
    for (int c = 0; c < kCells; ++c) probs.push_back(cfg.prob[k] * cell_w[c]);
  probs.push_back(std::max(0.0, 1.0 - w_x - w_z));  // basis mismatch, sifted out
  const auto cells = draw_multinomial(rng, static_cast<std::int64_t>(ch.n_total), probs);

  SampledRun run;
  double test_conc = 0.0;
  double test_err = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int cutoff = photon_cutoff(cfg.mu[k]);
    std::vector<double> pm(cutoff + 1);
    for (int m = 0; m <= cutoff; ++m) pm[m] = photon_given_intensity(m, cfg.mu[k]);
    for (int c = 0; c < kCells; ++c) {
      const Basis basis = (c == kCellX) ? kX : kZ;
      // last bin absorbs the (< 1e-20) tail
      const auto by_m = draw_multinomial(rng, cells[k * kCells + c], pm);
      for (int m = 0; m <= cutoff; ++m) {
        if (by_m[m] == 0) continue;
        const RoundOutcome o = outcome_given_photons(m, basis, ch);
        const auto res = draw_multinomial(rng, by_m[m], {o.correct, o.error, o.none});
        const double conc = static_cast<double>(res[0] + res[1]);
        const double err = static_cast<double>(res[1]);
        if (c == kCellX) {
          run.obs.x.n[k] += conc;
          run.obs.x_err.n[k] += err;
          if (m < 2) {
            run.tags.x[m] += conc;
            run.tags.x_err[m] += err;
          }
        } else if (c == kCellKey) {
          run.obs.k.n[k] += conc;
          if (m < 2) run.tags.k[m] += conc;
        } else {
          test_conc += conc;
          test_err += err;
        }
      }
    }
  }
  run.obs.n_z_test = test_conc;
  run.obs.e_z = test_conc > 0.0 ? test_err / test_conc : 0.0;
  return run;
}

}  // namespace mmqkd
