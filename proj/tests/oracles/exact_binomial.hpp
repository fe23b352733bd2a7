#pragma once

// Test-side oracle: binomial upper tails by direct long-double summation in log space.
// Shares no code with the library's incomplete-beta route.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

inline long double exact_upper_tail(std::uint64_t n, long double p, std::uint64_t k) {
  if (k == 0) return 1.0L;
  if (k > n) return 0.0L;
  if (p <= 0.0L) return 0.0L;
  if (p >= 1.0L) return 1.0L;
  const long double lp = std::log(p);
  const long double lq = std::log1p(-p);
  const long double lnf = std::lgamma(static_cast<long double>(n) + 1.0L);
  std::vector<long double> terms;
  terms.reserve(n - k + 1);
  long double mx = -INFINITY;
  for (std::uint64_t i = k; i <= n; ++i) {
    const long double li = static_cast<long double>(i);
    const long double t = lnf - std::lgamma(li + 1.0L) -
                          std::lgamma(static_cast<long double>(n - i) + 1.0L) + li * lp +
                          static_cast<long double>(n - i) * lq;
    terms.push_back(t);
    mx = std::max(mx, t);
  }
  long double s = 0.0L;
  for (long double t : terms) s += std::exp(t - mx);
  return std::exp(mx) * s;
}

// Smallest integer >= n(delta + c), computed from the decimal inputs directly.
inline std::uint64_t exact_threshold(std::uint64_t n, long double delta, long double c) {
  const long double x = static_cast<long double>(n) * (delta + c);
  long double k = std::ceil(x - 1e-9L);
  if (k < 0) k = 0;
  return static_cast<std::uint64_t>(k);
}

}  // namespace oracle
