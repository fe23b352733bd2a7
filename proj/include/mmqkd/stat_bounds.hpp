#pragma once

#include <cstdint>

namespace mmqkd {

// Λ(n; δ; c) argument triple. delta + c may exceed 1 (empty tail).
struct TailQuery {
  std::uint64_t n = 1;
  double delta = 0.0;
  double c = 0.0;
};

// Smallest integer i with i >= n(delta + c). Products that land within a few ulps
// above an integer are treated as that integer, so grid values k/n - delta
// map back to k.
std::uint64_t tail_threshold(std::uint64_t n, double delta, double c);

// P[Bin(n, delta) >= k]. Valid for n up to ~1e15.
double binomial_upper_tail(std::uint64_t n, double delta, std::uint64_t k);

// Λ(n; δ; c) = sum_{i >= ceil(n(δ+c))} C(n,i) δ^i (1-δ)^(n-i).
// Throws domain_error for δ or c outside [0,1] or n == 0.
double binomial_tail(const TailQuery& q);

// Least c on the threshold grid with Λ(n; δ; c) <= eps_sq. Exactly 0 for δ = 0.
double gamma_bin(std::uint64_t n, double delta, double eps_sq);

// f_serf(n_X, n_K) = n_K n_X^2 / ((n_K + n_X)(n_X + 1)).
double f_serf(double n_test, double n_key);

// sqrt(ln(1/eps_sq) / f_serf). Throws degenerate_input on zero counts.
double gamma_serf(double n_test, double n_key, double eps_sq);

// t = sqrt(n_O/2 * ln(2/eps_sq)).
double hoeffding_decoy_dev(double n_outcome, double eps_sq);

}  // namespace mmqkd
