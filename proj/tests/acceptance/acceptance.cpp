// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mmqkd/channel_sim.hpp"
#include "mmqkd/decoy.hpp"
#include "mmqkd/detector_model.hpp"
#include "mmqkd/keyrate.hpp"
#include "mmqkd/linalg.hpp"
#include "mmqkd/mc_verify.hpp"
#include "mmqkd/phase_error.hpp"
#include "mmqkd/stat_bounds.hpp"
#include "oracles/exact_binomial.hpp"

using namespace mmqkd;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

ChannelSpec reference(double loss_db, const DetectorSpec& det = {}) {
  ChannelSpec ch;
  ch.eta_ch = eta_from_loss_db(loss_db);
  ch.theta_deg = 2.0;
  ch.detector = det;
  return ch;
}

Outcome degenerate_reduction() {
  const DeltaPair d = closed_form_deltas({0.7, 1e-6, 0.0, 0.0});
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double e = 0.01 * i;
      const double n = std::floor(std::pow(10.0, 2.0 + 0.8 * j));
      PhaseErrorQuery q;
      q.e_obs = e;
      q.n_test = n;
      q.n_key = n;
      q.deltas = d;
      q.eps_a_sq = q.eps_b_sq = q.eps_c_sq = 1e-24;
      worst = std::max(worst, std::fabs(bound_mismatch(q).value - bound_perfect(e, n, n, 1e-24)));
    }
  }
  return {worst <= 1e-12 && d.delta1 == 0.0 && d.delta2 == 0.0, fmt("100 points, max |diff| = %.3g", worst)};
}

Outcome delta_oracle() {
  Outcome o;
  std::string det;
  for (double D : {0.0, 0.005, 0.01, 0.02}) {
    const DetectorSpec spec{0.7, 1e-6, D, D};
    const DeltaPair cf = closed_form_deltas(spec);
    OracleOptions opt;
    opt.n_max = 4;
    const DeltaPair orc = oracle_deltas(spec, opt);
    bool ok = orc.delta1 <= cf.delta1 + 1e-9 && orc.delta2 <= cf.delta2 + 1e-9;
    if (D == 0.0) ok = ok && cf.delta1 <= 1e-10 && cf.delta2 <= 1e-10 && orc.delta1 <= 1e-10 && orc.delta2 <= 1e-10;
    o.pass = o.pass && ok;
    det += fmt("D=%g oracle (%.6g, %.6g) <= closed (%.6g, %.6g); ", D, orc.delta1, orc.delta2, cf.delta1, cf.delta2);
  }
  o.detail = det;
  return o;
}

Outcome simplified_bounds() {
  double worst1 = 0.0, worst2 = 0.0;
  int points = 0;
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; j <= 8; ++j) {
      const double de = 0.0025 * i, dd = 0.0025 * j;
      const double m = std::max(de, dd);
      if (m == 0.0) continue;
      const DeltaPair d = closed_form_deltas({0.7, 1e-6, de, dd});
      worst1 = std::max(worst1, std::fabs(d.delta1 / (4 * m) - 1.0));
      worst2 = std::max(worst2, std::fabs(d.delta2 / (2 * m) - 1.0));
      ++points;
    }
  }
  return {worst1 <= 0.1 && worst2 <= 0.1,
          fmt("%d grid points, max rel. dev. delta1 %.4f, delta2 %.4f", points, worst1, worst2)};
}

Outcome gamma_bin_inversion() {
  std::mt19937_64 rng(5150);
  std::uniform_int_distribution<std::uint64_t> nd(1, 10000);
  std::uniform_real_distribution<double> dd(1e-4, 0.9), ed(-24.0, -1.0);
  int bad = 0, checked_below = 0;
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t n = nd(rng);
    const double delta = dd(rng);
    const double eps_sq = std::pow(10.0, ed(rng));
    const double g = gamma_bin(n, delta, eps_sq);
    const std::uint64_t k = oracle::exact_threshold(n, delta, g);
    // 1e-9 relative slack covers incomplete-beta vs summation rounding
    if (oracle::exact_upper_tail(n, delta, k) > eps_sq * (1 + 1e-9)) ++bad;
    if (g >= 1.0 / n) {
      ++checked_below;
      const std::uint64_t k1 = oracle::exact_threshold(n, delta, g - 1.0 / n);
      if (!(oracle::exact_upper_tail(n, delta, k1) > eps_sq * (1 - 1e-9))) ++bad;
    }
  }
  return {bad == 0, fmt("500 triples (%d with gamma >= 1/n), %d violations", checked_below, bad)};
}

Outcome monte_carlo() {
  const TrialConfig cfg;  // n = 2000, 1e5 trials
  const VerifyReport r[] = {verify_serfling(cfg), verify_small_povm(cfg), verify_freq_transfer(cfg),
                            verify_decoy_hoeffding(cfg, DecoyConfig{})};
  Outcome o;
  for (const auto& x : r) {
    o.pass = o.pass && x.pass;
    o.detail += fmt("%s %s (emp %.3g vs bound %.3g, sigma %.2g); ", x.lemma.c_str(), x.pass ? "ok" : "FAILED",
                    x.empirical, x.bound, x.sigma);
  }
  return o;
}

Outcome decoy_sandwich() {
  ChannelSpec ch = reference(10.0);
  ch.n_total = 10'000'000;
  const DecoyConfig cfg;
  const double eps_sq = 1e-24;
  int failures = 0;
  double min_gap = 1e300;
  for (std::uint64_t run = 0; run < 1000; ++run) {
    const SampledRun s = sample_observations(ch, cfg, 1000 + run);
    const OutcomeCounts* cls[] = {&s.obs.x, &s.obs.x_err, &s.obs.k};
    const std::array<double, 2>* tags[] = {&s.tags.x, &s.tags.x_err, &s.tags.k};
    bool ok = true;
    for (int c = 0; c < 3; ++c) {
      const DecoyBounds b = decoy_bounds(*cls[c], cfg, eps_sq);
      const double n0 = (*tags[c])[0], n1 = (*tags[c])[1];
      ok = ok && b.single_lower <= n1 && n1 <= b.single_upper && b.vacuum_lower <= n0;
      min_gap = std::min({min_gap, n1 - b.single_lower, b.single_upper - n1});
    }
    failures += !ok;
  }
  return {failures == 0, fmt("1000 runs at 1e7 rounds, %d failures, tightest margin %.4g counts", failures, min_gap)};
}

Outcome keyrate_structure() {
  const DecoyConfig cfg;
  const EpsilonBudget eps;
  const LambdaEc ec = make_lambda_ec(1.16);
  auto rate = [&](double loss, double de, double dd) {
    const DetectorSpec det{0.7, 1e-6, de, dd};
    const ChannelSpec ch = reference(loss, det);
    const Observations obs = expected_observations(ch, cfg);
    return static_cast<double>(key_length_decoy(obs, cfg, closed_form_deltas(det), eps, ec).key_length) /
           static_cast<double>(ch.n_total);
  };
  Outcome o;
  // (a)
  bool a = true;
  double prev = 1.0, r20 = 0.0;
  for (int db = 0; db <= 20; ++db) {
    const double r = rate(db, 0.0, 0.0);
    a = a && r > 0.0 && r <= prev;
    prev = r;
    r20 = r;
  }
  // (b)
  bool b = true;
  const double ds[] = {0.0, 0.005, 0.01, 0.02};
  for (double loss : {0.0, 10.0, 20.0}) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double r = rate(loss, ds[i], ds[j]);
        if (i + 1 < 4) b = b && rate(loss, ds[i + 1], ds[j]) <= r;
        if (j + 1 < 4) b = b && rate(loss, ds[i], ds[j + 1]) <= r;
      }
    }
  }
  // (c)
  bool c = true;
  for (int db = 0; db <= 20; db += 2) c = c && rate(db, 0.0, 1.0) == 0.0;
  // (d)
  const double sec = eps.total_decoy();
  const double want = (2 * std::sqrt(12.0) + 2) * 1e-12;
  const bool d = std::fabs(sec - want) <= 1e-15 * want;
  o.pass = a && b && c && d;
  auto yn = [](bool v) { return v ? "ok" : "FAILED"; };
  o.detail = fmt("(a) %s, rate at 20 dB %.4g; (b) %s; (c) %s; (d) %s, security parameter %.15g", yn(a), r20, yn(b),
                 yn(c), yn(d), sec);
  return o;
}

Outcome povm_structure() {
  std::mt19937_64 rng(8080);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_complete = 0.0, worst_recon = 0.0, worst_neg = 0.0, worst_dom = 0.0;
  for (int corner = 0; corner < 50; ++corner) {
    const double eta = 0.3 + 0.6 * u(rng);
    const double dc = std::pow(10.0, -7.0 + 5.0 * u(rng));
    const double de = std::min(0.3, 1.0 / eta - 1.0) * u(rng);
    const double dd = 0.5 * u(rng);
    const DetectorSpec spec{eta, dc, de, dd};
    DetectorSetting s;
    std::uniform_int_distribution<int> bit(0, 1);
    for (int b = 0; b < 2; ++b) {
      for (int j = 0; j < 2; ++j) {
        s.eta[b][j] = bit(rng) ? spec.eta_max() : spec.eta_min();
        s.dc[b][j] = bit(rng) ? spec.d_max() : spec.d_min();
      }
    }
    s = s.renormalized();
    for (int n = 0; n <= 6; ++n) {
      const PovmBlock blk = build_block_povms(n, s);
      const Eigen::Index dim = 2 * (n + 1);
      const Mat id = Mat::Identity(dim, dim);
      const Mat rt = sqrt_psd(blk.f_tilde);
      for (Basis b : {kZ, kX}) {
        const auto& p = blk.basis[b];
        for (const Mat* m : {&p.error, &p.no_error, &p.inconclusive, &p.second_error, &p.second_no_error,
                             &p.filter_con, &p.filter_prime_con}) {
          worst_neg = std::max(worst_neg, -min_eigenvalue(*m));
        }
        worst_complete = std::max({worst_complete, max_abs(p.error + p.no_error + p.inconclusive - id),
                                   max_abs(p.second_error + p.second_no_error - id)});
        const Mat rc = sqrt_psd(p.filter_con);
        worst_recon = std::max({worst_recon, max_abs(rc * p.second_error * rc - p.error),
                                max_abs(rc * p.second_no_error * rc - p.no_error),
                                max_abs(rt * p.filter_prime_con * rt - p.filter_con)});
        worst_dom = std::max(worst_dom, -min_eigenvalue(blk.f_tilde - p.filter_con));
      }
    }
  }
  const double tol = 1e-10;
  return {worst_complete <= tol && worst_recon <= tol && worst_neg <= tol && worst_dom <= tol,
          fmt("50 corners x N<=6: completeness %.2g, reconstruction %.2g, min eigenvalue %.2g, F~ dominance %.2g",
              worst_complete, worst_recon, -worst_neg, -worst_dom)};
}

}  // namespace

int main() {
  const std::vector<Criterion> all{
      {1, "degenerate-mismatch reduction", 1.0, degenerate_reduction},
      {2, "delta closed form vs oracle", 60.0, delta_oracle},
      {3, "simplified delta bounds", 1.0, simplified_bounds},
      {4, "gamma_bin inversion", 30.0, gamma_bin_inversion},
      {5, "Monte Carlo lemma suite", 60.0, monte_carlo},
      {6, "decoy sandwich", 300.0, decoy_sandwich},
      {7, "key-rate structure", 120.0, keyrate_structure},
      {8, "POVM structural suite", 120.0, povm_structure},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool ok = o.pass && in_time;
    failed += !ok;
    std::printf("%s  %d. %s [%.2fs / %.0fs] %s%s\n", ok ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                o.detail.c_str(), in_time ? "" : " (over time budget)");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
