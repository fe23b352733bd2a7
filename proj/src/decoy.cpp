#include "mmqkd/decoy.hpp"

#include <algorithm>
#include <cmath>

#include "mmqkd/error.hpp"
#include "mmqkd/stat_bounds.hpp"

namespace mmqkd {

void DecoyConfig::validate() const {
  for (int k = 0; k < 3; ++k) {
    if (!(mu[k] >= 0.0) || !std::isfinite(mu[k])) throw config_error("intensities must be finite and >= 0");
    if (!(prob[k] > 0.0 && prob[k] <= 1.0)) throw config_error("intensity probabilities must lie in (0,1]");
  }
  if (std::fabs(prob[0] + prob[1] + prob[2] - 1.0) > 1e-9) {
    throw config_error("intensity probabilities must sum to 1");
  }
  if (!(mu[1] > mu[2])) throw config_error("need mu2 > mu3");
  if (!(mu[0] > mu[1] + mu[2])) throw config_error("need mu1 > mu2 + mu3");
}

double photon_given_intensity(int m, double mu) {
  if (m < 0) throw domain_error("photon number must be nonnegative");
  if (!(mu >= 0.0)) throw domain_error("intensity must be nonnegative");
  if (mu == 0.0) return m == 0 ? 1.0 : 0.0;
  return std::exp(-mu + m * std::log(mu) - std::lgamma(m + 1.0));
}

double tau(int m, const DecoyConfig& cfg) {
  double t = 0.0;
  for (int k = 0; k < 3; ++k) t += cfg.prob[k] * photon_given_intensity(m, cfg.mu[k]);
  return t;
}

double intensity_given_photon(int k, int m, const DecoyConfig& cfg) {
  const double t = tau(m, cfg);
  if (t == 0.0) return 0.0;
  return cfg.prob[k] * photon_given_intensity(m, cfg.mu[k]) / t;
}

ShiftedCounts shifted_counts(const OutcomeCounts& counts, const DecoyConfig& cfg, double eps_sq) {
  for (double v : counts.n) {
    if (!(v >= 0.0)) throw domain_error("counts must be nonnegative");
  }
  const double t = hoeffding_decoy_dev(counts.total(), eps_sq);
  ShiftedCounts s;
  for (int k = 0; k < 3; ++k) {
    const double scale = std::exp(cfg.mu[k]) / cfg.prob[k];
    s.minus[k] = std::max(0.0, scale * (counts.n[k] - t));
    s.plus[k] = scale * (counts.n[k] + t);
  }
  return s;
}

namespace {

double clamp_count(double v, double n_o) { return std::clamp(v, 0.0, n_o); }

double vacuum_lower(const ShiftedCounts& s, const DecoyConfig& cfg, double n_o) {
  const double m2 = cfg.mu[1], m3 = cfg.mu[2];
  return clamp_count(tau(0, cfg) * (m2 * s.minus[2] - m3 * s.plus[1]) / (m2 - m3), n_o);
}

double single_lower(const ShiftedCounts& s, const DecoyConfig& cfg, double n_o, double b0) {
  const double m1 = cfg.mu[0], m2 = cfg.mu[1], m3 = cfg.mu[2];
  const double pre = m1 * tau(1, cfg) / (m1 * (m2 - m3) - m2 * m2 + m3 * m3);
  const double inner = s.minus[1] - s.plus[2] -
                       (m2 * m2 - m3 * m3) / (m1 * m1) * (s.plus[0] - b0 / tau(0, cfg));
  return clamp_count(pre * inner, n_o);
}

double single_upper(const ShiftedCounts& s, const DecoyConfig& cfg, double n_o) {
  const double m2 = cfg.mu[1], m3 = cfg.mu[2];
  return clamp_count(tau(1, cfg) * (s.plus[1] - s.minus[2]) / (m2 - m3), n_o);
}

}  // namespace

double bound_vacuum_lower(const OutcomeCounts& counts, const DecoyConfig& cfg, double eps_sq) {
  return decoy_bounds(counts, cfg, eps_sq).vacuum_lower;
}

double bound_single_lower(const OutcomeCounts& counts, const DecoyConfig& cfg, double eps_sq) {
  return decoy_bounds(counts, cfg, eps_sq).single_lower;
}

double bound_single_upper(const OutcomeCounts& counts, const DecoyConfig& cfg, double eps_sq) {
  return decoy_bounds(counts, cfg, eps_sq).single_upper;
}

DecoyBounds decoy_bounds(const OutcomeCounts& counts, const DecoyConfig& cfg, double eps_sq) {
  cfg.validate();
  const ShiftedCounts s = shifted_counts(counts, cfg, eps_sq);
  const double n_o = counts.total();
  DecoyBounds b;
  b.vacuum_lower = vacuum_lower(s, cfg, n_o);
  b.single_lower = single_lower(s, cfg, n_o, b.vacuum_lower);
  b.single_upper = single_upper(s, cfg, n_o);
  b.infeasible = b.single_lower > b.single_upper;
  return b;
}

}  // namespace mmqkd
