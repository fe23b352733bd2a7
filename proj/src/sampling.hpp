#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace mmqkd::detail {

inline std::int64_t draw_binomial(std::mt19937_64& rng, std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(rng);
}

// Sequential-binomial multinomial; probs need not be normalized.
inline std::vector<std::int64_t> draw_multinomial(std::mt19937_64& rng, std::int64_t n,
                                                  const std::vector<double>& probs) {
  std::vector<std::int64_t> out(probs.size(), 0);
  double rest = 0.0;
  for (double p : probs) rest += p;
  std::int64_t left = n;
  for (std::size_t i = 0; i + 1 < probs.size() && left > 0; ++i) {
    const double q = rest > 0.0 ? std::clamp(probs[i] / rest, 0.0, 1.0) : 0.0;
    out[i] = draw_binomial(rng, left, q);
    left -= out[i];
    rest -= probs[i];
  }
  if (!probs.empty()) out.back() += left;
  return out;
}

}  // namespace mmqkd::detail
