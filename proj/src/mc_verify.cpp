#include "mmqkd/mc_verify.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <utility>

#include "mmqkd/error.hpp"
#include "mmqkd/stat_bounds.hpp"
#include "sampling.hpp"

namespace mmqkd {

using detail::draw_binomial;
using detail::draw_multinomial;

namespace {

std::mt19937_64 trial_rng(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// n rounds split as evenly as possible into `levels` groups
std::vector<std::int64_t> level_sizes(std::uint64_t n, int levels) {
  std::vector<std::int64_t> out(levels, static_cast<std::int64_t>(n / levels));
  for (std::uint64_t i = 0; i < n % levels; ++i) ++out[i];
  return out;
}

// Runs body(rng, i) for every trial; results land at index i.
template <class T, class Body>
std::vector<T> run_trials(const TrialConfig& cfg, std::uint64_t stream, Body body) {
  std::vector<T> out(cfg.trials);
  tbb::parallel_for(tbb::blocked_range<std::uint64_t>(0, cfg.trials), [&](const auto& r) {
    for (std::uint64_t i = r.begin(); i != r.end(); ++i) {
      auto rng = trial_rng(cfg.seed, i, stream);
      out[i] = body(rng, i);
    }
  });
  return out;
}

VerifyCell make_cell(std::string label, std::uint64_t hits, std::uint64_t trials, double bound) {
  VerifyCell c;
  c.label = std::move(label);
  c.trials = trials;
  c.empirical = trials > 0 ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
  c.bound = bound;
  c.sigma = binomial_sigma(c.empirical, trials);
  c.pass = c.empirical <= c.bound + 3.0 * c.sigma;
  return c;
}

VerifyReport summarize(std::string lemma, std::vector<VerifyCell> cells) {
  VerifyReport rep;
  rep.lemma = std::move(lemma);
  double worst = -1e300;
  for (const auto& c : cells) {
    if (!c.asserted) continue;
    rep.pass = rep.pass && c.pass;
    const double excess = c.empirical - c.bound - 3.0 * c.sigma;
    if (excess > worst) {
      worst = excess;
      rep.empirical = c.empirical;
      rep.bound = c.bound;
      rep.sigma = c.sigma;
    }
  }
  rep.cells = std::move(cells);
  return rep;
}

std::string fmt(const char* name, double v) {
  std::ostringstream os;
  os << name << "=" << v;
  return os.str();
}

}  // namespace

void TrialConfig::validate() const {
  if (n == 0) throw config_error("verify.n must be positive");
  if (trials == 0) throw config_error("verify.trials must be positive");
  if (!(p_test > 0.0 && p_key > 0.0 && p_test + p_key <= 1.0)) {
    throw config_error("verify.p_test and verify.p_key must be positive with sum at most 1");
  }
  if (!(density >= 0.0 && density <= 1.0)) throw config_error("verify.density must lie in [0,1]");
  if (!(gamma >= 0.0)) throw config_error("verify.gamma must be nonnegative");
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) throw config_error("verify.error_rate must lie in [0,1]");
  if (!(delta >= 0.0 && delta <= 0.5)) throw config_error("verify.delta must lie in [0,0.5]");
  if (!(eps_sq > 0.0 && eps_sq <= 1.0)) throw config_error("verify.eps_sq must lie in (0,1]");
  if (!(decoy_eps_sq > 0.0 && decoy_eps_sq <= 1.0)) throw config_error("verify.decoy_eps_sq must lie in (0,1]");
  if (!(markov_stay >= 0.0 && markov_stay <= 1.0)) throw config_error("verify.markov_stay must lie in [0,1]");
  if (levels < 1) throw config_error("verify.levels must be positive");
  for (double e : e_grid) {
    if (!(e >= 0.0 && e <= 1.0)) throw config_error("verify.e_grid entries must lie in [0,1]");
  }
}

double binomial_sigma(double freq, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(std::max(0.0, freq * (1.0 - freq)) / static_cast<double>(trials));
}

VerifyReport verify_serfling(const TrialConfig& cfg) {
  cfg.validate();
  const std::uint64_t ones = static_cast<std::uint64_t>(std::llround(cfg.density * static_cast<double>(cfg.n)));
  struct Trial {
    std::uint32_t n_x = 0, n_k = 0;
    bool violated = false;
  };
  const double p_rest = std::max(0.0, 1.0 - cfg.p_test - cfg.p_key);
  const auto res = run_trials<Trial>(cfg, 1, [&](std::mt19937_64& rng, std::uint64_t) {
    // positions are assigned IID, so only the split of ones and of zeros matters
    const auto o = draw_multinomial(rng, static_cast<std::int64_t>(ones), {cfg.p_test, cfg.p_key, p_rest});
    const auto z = draw_multinomial(rng, static_cast<std::int64_t>(cfg.n - ones), {cfg.p_test, cfg.p_key, p_rest});
    Trial t;
    t.n_x = static_cast<std::uint32_t>(o[0] + z[0]);
    t.n_k = static_cast<std::uint32_t>(o[1] + z[1]);
    if (t.n_x > 0 && t.n_k > 0) {
      const double test_mean = static_cast<double>(o[0]) / t.n_x;
      const double key_mean = static_cast<double>(o[1]) / t.n_k;
      t.violated = key_mean >= test_mean + cfg.gamma;
    }
    return t;
  });

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<std::uint64_t, std::uint64_t>> strata;
  for (const auto& t : res) {
    if (t.n_x == 0 || t.n_k == 0) continue;
    auto& s = strata[{t.n_x, t.n_k}];
    ++s.first;
    s.second += t.violated;
  }
  std::vector<VerifyCell> cells;
  for (const auto& [key, s] : strata) {
    const double f = f_serf(key.first, key.second);
    VerifyCell c = make_cell("n_x=" + std::to_string(key.first) + ",n_k=" + std::to_string(key.second), s.second,
                             s.first, std::exp(-2.0 * cfg.gamma * cfg.gamma * f));
    c.asserted = s.first >= cfg.min_stratum;
    cells.push_back(std::move(c));
  }
  return summarize("serfling", std::move(cells));
}

VerifyReport verify_small_povm(const TrialConfig& cfg) {
  cfg.validate();
  const double c = gamma_bin(cfg.n, cfg.delta, cfg.eps_sq);
  // at delta = 0 the tail is defined as 0, so the event is any click at all
  const std::uint64_t k = std::max<std::uint64_t>(tail_threshold(cfg.n, cfg.delta, c), cfg.delta == 0.0 ? 1 : 0);
  const double lambda = binomial_tail({cfg.n, cfg.delta, c});

  // per-round click probabilities as (rounds, p) levels
  const auto spread = level_sizes(cfg.n, cfg.levels);
  std::vector<VerifyCell> cells;
  for (int variant = 0; variant < 2; ++variant) {
    std::vector<std::pair<std::int64_t, double>> lv;
    if (variant == 0) {
      lv.emplace_back(static_cast<std::int64_t>(cfg.n), cfg.delta);
    } else {
      for (int l = 0; l < cfg.levels; ++l) lv.emplace_back(spread[l], cfg.delta * (l + 1) / cfg.levels);
    }
    const auto res = run_trials<std::uint8_t>(cfg, 10 + variant, [&](std::mt19937_64& rng, std::uint64_t) {
      std::int64_t clicks = 0;
      for (const auto& [rounds, p] : lv) clicks += draw_binomial(rng, rounds, p);
      return static_cast<std::uint8_t>(static_cast<std::uint64_t>(clicks) >= k);
    });
    std::uint64_t hits = 0;
    for (auto h : res) hits += h;
    cells.push_back(make_cell(std::string(variant == 0 ? "p_i=delta" : "p_i in (0,delta]") + "," + fmt("c", c), hits,
                              cfg.trials, lambda));
  }
  return summarize("smallpovm", std::move(cells));
}

VerifyReport verify_freq_transfer(const TrialConfig& cfg) {
  cfg.validate();
  const double two_delta = 2.0 * cfg.delta;
  const double c = gamma_bin(cfg.n, two_delta, cfg.eps_sq);
  const double lambda = binomial_tail({cfg.n, two_delta, c});

  std::vector<VerifyCell> cells;
  for (std::size_t g = 0; g < cfg.e_grid.size(); ++g) {
    const double e = cfg.e_grid[g];
    // levels of (rounds, p, p'): p spread around e, p' moved by at most delta, mostly upward
    struct Level {
      std::int64_t rounds;
      double p, q;
    };
    const auto spread = level_sizes(cfg.n, cfg.levels);
    std::vector<Level> lv;
    for (int l = 0; l < cfg.levels; ++l) {
      const double frac = (l + 0.5) / cfg.levels;
      const double shift = -0.25 + 1.25 * (((l * 7) % cfg.levels) + 0.5) / cfg.levels;
      const double p = std::clamp(e * (0.5 + frac), 0.0, 1.0);
      lv.push_back({spread[l], p, std::clamp(p + cfg.delta * shift, 0.0, 1.0)});
    }
    const std::uint64_t k_lhs = tail_threshold(cfg.n, e + two_delta, c);
    const std::uint64_t k_rhs = tail_threshold(cfg.n, e, 0.0);
    struct Trial {
      bool lhs = false, rhs = false;
    };
    const auto res = run_trials<Trial>(cfg, 100 + g, [&](std::mt19937_64& rng, std::uint64_t) {
      // coupled rounds fall in three classes: both click, only the larger one clicks, neither
      std::int64_t n_p = 0, n_q = 0;
      for (const auto& L : lv) {
        const double lo = std::min(L.p, L.q), hi = std::max(L.p, L.q);
        const auto t = draw_multinomial(rng, L.rounds, {lo, hi - lo, 1.0 - hi});
        n_p += t[0] + (L.p > L.q ? t[1] : 0);
        n_q += t[0] + (L.q > L.p ? t[1] : 0);
      }
      return Trial{static_cast<std::uint64_t>(n_q) >= k_lhs, static_cast<std::uint64_t>(n_p) >= k_rhs};
    });
    std::uint64_t lhs = 0, rhs = 0;
    for (const auto& t : res) {
      lhs += t.lhs;
      rhs += t.rhs;
    }
    const double rhs_freq = static_cast<double>(rhs) / static_cast<double>(cfg.trials);
    VerifyCell cell = make_cell(fmt("e", e) + "," + fmt("c", c), lhs, cfg.trials, rhs_freq + lambda);
    // both sides are estimates
    cell.sigma = std::hypot(cell.sigma, binomial_sigma(rhs_freq, cfg.trials));
    cell.pass = cell.empirical <= cell.bound + 3.0 * cell.sigma;
    cells.push_back(std::move(cell));
  }
  return summarize("transfer", std::move(cells));
}

VerifyReport verify_decoy_hoeffding(const TrialConfig& cfg, const DecoyConfig& decoy) {
  cfg.validate();
  decoy.validate();
  constexpr int kMaxPhotons = 12;
  std::vector<double> tau_m(kMaxPhotons + 1);
  std::array<std::vector<double>, 3> given;
  for (int m = 0; m <= kMaxPhotons; ++m) tau_m[m] = tau(m, decoy);
  for (int k = 0; k < 3; ++k) {
    given[k].resize(kMaxPhotons + 1);
    for (int m = 0; m <= kMaxPhotons; ++m) given[k][m] = intensity_given_photon(k, m, decoy);
  }
  const double t = hoeffding_decoy_dev(static_cast<double>(cfg.n), cfg.decoy_eps_sq);
  const double bound = std::min(1.0, 2.0 * std::exp(-2.0 * t * t / static_cast<double>(cfg.n)));

  const auto res = run_trials<std::array<bool, 3>>(cfg, 200, [&](std::mt19937_64& rng, std::uint64_t) {
    std::discrete_distribution<int> fresh(tau_m.begin(), tau_m.end());
    // occupation counts of the photon-number chain, one run at a time
    std::vector<std::int64_t> occ(kMaxPhotons + 1, 0);
    std::int64_t left = static_cast<std::int64_t>(cfg.n);
    while (left > 0) {
      const int m = fresh(rng);
      std::int64_t run = left;
      if (cfg.markov_stay < 1.0) {
        std::geometric_distribution<std::int64_t> stays(1.0 - cfg.markov_stay);
        run = std::min(left, 1 + stays(rng));
      }
      occ[m] += run;
      left -= run;
    }
    // given the sequence, intensities are independent with p_{k|m}
    std::array<double, 3> count{}, expect{};
    for (int m = 0; m <= kMaxPhotons; ++m) {
      if (occ[m] == 0) continue;
      const auto split = draw_multinomial(rng, occ[m], {given[0][m], given[1][m], given[2][m]});
      for (int i = 0; i < 3; ++i) {
        count[i] += static_cast<double>(split[i]);
        expect[i] += static_cast<double>(occ[m]) * given[i][m];
      }
    }
    std::array<bool, 3> out{};
    for (int i = 0; i < 3; ++i) out[i] = std::fabs(count[i] - expect[i]) >= t;
    return out;
  });
  std::vector<VerifyCell> cells;
  for (int k = 0; k < 3; ++k) {
    std::uint64_t hits = 0;
    for (const auto& r : res) hits += r[k];
    cells.push_back(make_cell("intensity=" + std::to_string(k) + "," + fmt("t", t), hits, cfg.trials, bound));
  }
  return summarize("decoy", std::move(cells));
}

VerifyReport verify_phase_bound(const TrialConfig& cfg) {
  cfg.validate();
  const double q = cfg.error_rate;
  const double p_rest = std::max(0.0, 1.0 - cfg.p_test - cfg.p_key);
  const auto res = run_trials<std::uint8_t>(cfg, 300, [&](std::mt19937_64& rng, std::uint64_t) {
    const auto t = draw_multinomial(rng, static_cast<std::int64_t>(cfg.n),
                                    {cfg.p_test * q, cfg.p_test * (1 - q), cfg.p_key * q, cfg.p_key * (1 - q), p_rest});
    const std::int64_t n_x = t[0] + t[1], n_k = t[2] + t[3];
    if (n_x == 0 || n_k == 0) return std::uint8_t{0};
    const double e_obs = static_cast<double>(t[0]) / static_cast<double>(n_x);
    const double phase = static_cast<double>(t[2]) / static_cast<double>(n_k);
    return static_cast<std::uint8_t>(phase >= e_obs + gamma_serf(n_x, n_k, cfg.eps_sq));
  });
  std::uint64_t hits = 0;
  for (auto h : res) hits += h;
  return summarize("phase", {make_cell(fmt("error_rate", cfg.error_rate), hits, cfg.trials, cfg.eps_sq)});
}

}  // namespace mmqkd
