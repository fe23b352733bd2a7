#include "mmqkd/detector_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mmqkd/error.hpp"

namespace mmqkd {

void DetectorSpec::validate() const {
  if (!(eta_det > 0.0 && eta_det <= 1.0)) throw config_error("eta_det must lie in (0,1]");
  if (!(d_det >= 0.0 && d_det < 1.0)) throw config_error("d_det must lie in [0,1)");
  if (!(delta_eta >= 0.0 && delta_eta <= 1.0)) throw config_error("delta_eta must lie in [0,1]");
  if (!(delta_dc >= 0.0 && delta_dc <= 1.0)) throw config_error("delta_dc must lie in [0,1]");
  if (eta_max() > 1.0 + 1e-15) throw config_error("eta_det * (1 + delta_eta) exceeds 1");
  if (!(d_max() < 1.0)) throw config_error("d_det * (1 + delta_dc) must stay below 1");
  if (!(eta_min() > 0.0)) throw config_error("eta_det * (1 - delta_eta) must be positive");
}

DeltaPair closed_form_deltas(const DetectorSpec& spec) {
  spec.validate();
  const double d_min = spec.d_min();
  const double d_max = spec.d_max();
  const double eta_r = spec.eta_ratio();
  DeltaPair out;
  if (d_min <= 0.0) {
    // first delta1 branch has ratio 0
    out.delta1 = 4.0;
    out.delta2 = 1.0;
    out.degenerate = true;
    return out;
  }
  const double vac_min = 1.0 - (1.0 - d_min) * (1.0 - d_min);
  const double vac_max = 1.0 - (1.0 - d_max) * (1.0 - d_max);
  const double ratio = vac_min / vac_max;
  const double loss_term = (1.0 - d_min) * (1.0 - d_min) * (1.0 - eta_r);
  const double d1 = 4.0 * std::max(1.0 - std::sqrt(ratio), 1.0 - std::sqrt(1.0 - loss_term));
  const double d2 = std::max(1.0 - ratio, loss_term);
  out.delta1 = std::clamp(d1, 0.0, 4.0);
  out.delta2 = std::clamp(d2, 0.0, 1.0);
  return out;
}

DetectorSetting DetectorSetting::uniform(double eta, double dc) {
  DetectorSetting s;
  for (auto& row : s.eta) row = {eta, eta};
  for (auto& row : s.dc) row = {dc, dc};
  return s;
}

double DetectorSetting::eta_max() const {
  return std::max({eta[0][0], eta[0][1], eta[1][0], eta[1][1]});
}
double DetectorSetting::eta_min() const {
  return std::min({eta[0][0], eta[0][1], eta[1][0], eta[1][1]});
}
double DetectorSetting::d_max() const { return std::max({dc[0][0], dc[0][1], dc[1][0], dc[1][1]}); }
double DetectorSetting::d_min() const { return std::min({dc[0][0], dc[0][1], dc[1][0], dc[1][1]}); }

DetectorSetting DetectorSetting::renormalized() const {
  const double top = eta_max();
  if (!(top > 0.0)) throw domain_error("renormalization needs a positive efficiency");
  DetectorSetting s = *this;
  for (auto& row : s.eta) {
    for (double& e : row) e /= top;
  }
  return s;
}

Mat wigner_small_d(int two_j, double beta) {
  if (two_j < 0 || two_j > 2 * kHardPhotonLimit) {
    throw domain_error("wigner_small_d: two_j out of range");
  }
  const int n = two_j;
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  auto lf = [](int k) { return std::lgamma(static_cast<double>(k) + 1.0); };
  Mat d = Mat::Zero(n + 1, n + 1);
  for (int r = 0; r <= n; ++r) {
    for (int k = 0; k <= n; ++k) {
      const double pre = 0.5 * (lf(r) + lf(n - r) + lf(k) + lf(n - k));
      double sum = 0.0;
      for (int t = std::max(0, k - r); t <= std::min(k, n - r); ++t) {
        const double mag = std::exp(pre - lf(k - t) - lf(t) - lf(r - k + t) - lf(n - r - t));
        const double sign = ((r - k + t) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * mag * std::pow(c, n + k - r - 2 * t) * std::pow(s, r - k + 2 * t);
      }
      d(r, k) = sum;
    }
  }
  return d;
}

Mat mode_rotation(int photons) { return wigner_small_d(photons, 0.5 * std::numbers::pi); }

namespace {

struct BobDiagonals {
  Vec inconclusive, conclusive, zero, one, dbl;
};

// log of (1 - d)(1 - eta)^k, -inf when a factor vanishes
double log_silent(double d, double eta, int k) {
  const double a = std::log1p(-d);
  if (k == 0) return a;
  return a + k * std::log1p(-eta);
}

// Bob's outcome probabilities on |N0, N - N0>_b, indexed by N0.
BobDiagonals bob_diagonals(int n, const std::array<double, 2>& eta, const std::array<double, 2>& dc) {
  BobDiagonals b{Vec(n + 1), Vec(n + 1), Vec(n + 1), Vec(n + 1), Vec(n + 1)};
  for (int n0 = 0; n0 <= n; ++n0) {
    const double l0 = log_silent(dc[0], eta[0], n0);
    const double l1 = log_silent(dc[1], eta[1], n - n0);
    const double q0 = std::exp(l0), q1 = std::exp(l1);
    const double c0 = -std::expm1(l0), c1 = -std::expm1(l1);
    const double dbl = c0 * c1;
    b.inconclusive(n0) = q0 * q1;
    b.conclusive(n0) = -std::expm1(l0 + l1);
    b.dbl(n0) = dbl;
    b.zero(n0) = c0 * q1 + 0.5 * dbl;
    b.one(n0) = q0 * c1 + 0.5 * dbl;
  }
  return b;
}

Mat alice_projector(Basis b, int bit) {
  Mat p(2, 2);
  if (b == kZ) {
    p << (bit == 0 ? 1.0 : 0.0), 0.0, 0.0, (bit == 0 ? 0.0 : 1.0);
  } else {
    const double sgn = bit == 0 ? 0.5 : -0.5;
    p << 0.5, sgn, sgn, 0.5;
  }
  return p;
}

void check_probabilities(const DetectorSetting& s) {
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < 2; ++i) {
      if (!(s.eta[b][i] >= 0.0 && s.eta[b][i] <= 1.0) || !(s.dc[b][i] >= 0.0 && s.dc[b][i] <= 1.0)) {
        throw domain_error("detector efficiencies and dark-count probabilities must lie in [0,1]");
      }
    }
  }
}

}  // namespace

PovmBlock build_block_povms(int photons, const DetectorSetting& setting, int cutoff) {
  return build_block_povms(photons, setting, setting.eta_max(), setting.d_max(), cutoff);
}

PovmBlock build_block_povms(int photons, const DetectorSetting& setting, double f_eta_max,
                            double f_d_max, int cutoff) {
  if (photons < 0) throw domain_error("photon number must be nonnegative");
  if (photons > cutoff || photons > kHardPhotonLimit) {
    throw domain_error("photon block N=" + std::to_string(photons) + " exceeds the configured cutoff " +
                       std::to_string(std::min(cutoff, kHardPhotonLimit)));
  }
  check_probabilities(setting);

  const int n = photons;
  const int dim_b = n + 1;
  const int dim = 2 * dim_b;
  const Mat id_a = Mat::Identity(2, 2);
  const Mat id = Mat::Identity(dim, dim);
  const Mat u = mode_rotation(n);

  PovmBlock block;
  block.photons = n;
  block.f_tilde_value = -std::expm1(2.0 * std::log1p(-f_d_max) + (n == 0 ? 0.0 : n * std::log1p(-f_eta_max)));
  block.f_tilde = block.f_tilde_value * id;
  const bool f_on = block.f_tilde_value > kPinvTolerance;
  const Mat f_tilde_pinv = (f_on ? 1.0 / std::sqrt(block.f_tilde_value) : 0.0) * id;
  const Mat f_tilde_support = (f_on ? 1.0 : 0.0) * id;

  for (Basis b : {kZ, kX}) {
    const BobDiagonals diag = bob_diagonals(n, setting.eta[b], setting.dc[b]);
    auto to_common = [&](const Vec& v) -> Mat {
      if (b == kZ) return v.asDiagonal();
      return u * v.asDiagonal() * u.transpose();
    };
    BasisPovm& p = block.basis[b];
    p.bob_inconclusive = to_common(diag.inconclusive);
    p.bob_zero = to_common(diag.zero);
    p.bob_one = to_common(diag.one);
    p.bob_double = to_common(diag.dbl);

    const Mat a0 = alice_projector(b, 0);
    const Mat a1 = alice_projector(b, 1);
    p.inconclusive = kron(id_a, p.bob_inconclusive);
    p.error = kron(a0, p.bob_one) + kron(a1, p.bob_zero);
    p.no_error = kron(a0, p.bob_zero) + kron(a1, p.bob_one);
    p.filter_con = kron(id_a, to_common(diag.conclusive));

    // F_con shares its eigenvectors with the Bob diagonals
    Vec inv_root(dim_b), support(dim_b);
    for (int i = 0; i < dim_b; ++i) {
      const double c = diag.conclusive(i);
      inv_root(i) = c > kPinvTolerance ? 1.0 / std::sqrt(c) : 0.0;
      support(i) = c > kPinvTolerance ? 1.0 : 0.0;
    }
    const Mat s = kron(id_a, to_common(inv_root));
    const Mat pi = kron(id_a, to_common(support));
    p.second_error = s * p.error * s;
    p.second_no_error = s * p.no_error * s + id - pi;
    p.filter_prime_con = f_tilde_pinv * p.filter_con * f_tilde_pinv + id - f_tilde_support;
  }
  return block;
}

BlockDeltas block_deltas(const PovmBlock& block) {
  const Mat& g = block.basis[kX].second_error;
  const Mat rz = sqrt_psd(block.basis[kZ].filter_prime_con);
  const Mat rx = sqrt_psd(block.basis[kX].filter_prime_con);
  const Mat diff = rz * g * rz - rx * g * rx;
  const Eigen::Index dim = g.rows();
  BlockDeltas out;
  out.delta1 = 2.0 * norm_inf_sym(diff);
  out.delta2 = norm_inf_sym(Mat::Identity(dim, dim) - block.basis[kZ].filter_prime_con);
  return out;
}

BlockDeltas setting_deltas(const DetectorSetting& setting, int n_max, bool renormalize) {
  const DetectorSetting s = renormalize ? setting.renormalized() : setting;
  BlockDeltas out;
  for (int n = 0; n <= n_max; ++n) {
    const BlockDeltas d = block_deltas(build_block_povms(n, s, n_max));
    out.delta1 = std::max(out.delta1, d.delta1);
    out.delta2 = std::max(out.delta2, d.delta2);
  }
  return out;
}

namespace {

DetectorSetting from_unit_cube(const DetectorSpec& spec, const std::array<double, 8>& x) {
  DetectorSetting s;
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < 2; ++i) {
      s.eta[b][i] = spec.eta_min() + x[2 * b + i] * (spec.eta_max() - spec.eta_min());
      s.dc[b][i] = spec.d_min() + x[4 + 2 * b + i] * (spec.d_max() - spec.d_min());
    }
  }
  return s;
}

}  // namespace

DeltaPair oracle_deltas(const DetectorSpec& spec, const OracleOptions& options) {
  spec.validate();
  if (options.n_max < 1) throw domain_error("oracle needs n_max >= 1");
  if (options.n_max > kHardPhotonLimit) throw domain_error("oracle n_max exceeds the hard photon limit");

  std::vector<std::array<double, 8>> points;
  for (int mask = 0; mask < 256; ++mask) {
    std::array<double, 8> x{};
    for (int k = 0; k < 8; ++k) x[k] = (mask >> k) & 1;
    points.push_back(x);
  }
  if (options.interior_samples > 0) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int m = options.interior_samples;
    std::array<std::vector<int>, 8> strata;
    for (auto& st : strata) {
      st.resize(m);
      for (int i = 0; i < m; ++i) st[i] = i;
      std::shuffle(st.begin(), st.end(), rng);
    }
    for (int i = 0; i < m; ++i) {
      std::array<double, 8> x{};
      for (int k = 0; k < 8; ++k) x[k] = (strata[k][i] + u(rng)) / m;
      points.push_back(x);
    }
  }

  DeltaPair out;
  for (const auto& x : points) {
    const BlockDeltas d = setting_deltas(from_unit_cube(spec, x), options.n_max, options.renormalize);
    out.delta1 = std::max(out.delta1, d.delta1);
    out.delta2 = std::max(out.delta2, d.delta2);
  }
  out.degenerate = spec.d_min() <= 0.0;
  return out;
}

}  // namespace mmqkd
