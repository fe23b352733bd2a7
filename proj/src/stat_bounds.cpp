#include "mmqkd/stat_bounds.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "mmqkd/error.hpp"

namespace mmqkd {

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw domain_error(std::string(name) + " must lie in [0,1], got " + std::to_string(p));
  }
}

void check_eps_sq(double eps_sq) {
  if (!(eps_sq > 0.0 && eps_sq <= 1.0)) {
    throw domain_error("eps_sq must lie in (0,1], got " + std::to_string(eps_sq));
  }
}

}  // namespace

std::uint64_t tail_threshold(std::uint64_t n, double delta, double c) {
  const long double x = static_cast<long double>(n) *
                        (static_cast<long double>(delta) + static_cast<long double>(c));
  const long double tol = 1e-9L + 1e-14L * static_cast<long double>(n);
  const long double k = std::ceil(x - tol);
  if (k <= 0.0L) return 0;
  if (k > static_cast<long double>(n)) return n + 1;
  return static_cast<std::uint64_t>(k);
}

double binomial_upper_tail(std::uint64_t n, double delta, std::uint64_t k) {
  check_probability(delta, "delta");
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  if (delta == 0.0) return 0.0;
  if (delta == 1.0) return 1.0;
  // P[X >= k] = I_delta(k, n - k + 1)
  const double a = static_cast<double>(k);
  const double b = static_cast<double>(n - k + 1);
  return boost::math::ibeta(a, b, delta);
}

double binomial_tail(const TailQuery& q) {
  check_probability(q.delta, "delta");
  if (!(q.c >= 0.0)) throw domain_error("c must be nonnegative");
  if (q.n == 0) throw domain_error("n must be at least 1");
  return binomial_upper_tail(q.n, q.delta, tail_threshold(q.n, q.delta, q.c));
}

double gamma_bin(std::uint64_t n, double delta, double eps_sq) {
  check_probability(delta, "delta");
  check_eps_sq(eps_sq);
  if (n == 0) throw domain_error("n must be at least 1");
  if (delta == 0.0) return 0.0;

  const std::uint64_t k0 = tail_threshold(n, delta, 0.0);
  if (binomial_upper_tail(n, delta, k0) <= eps_sq) return 0.0;

  // invariant: tail(lo) > eps_sq, tail(hi) <= eps_sq; tail(n + 1) = 0
  std::uint64_t lo = k0;
  std::uint64_t hi = n + 1;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (binomial_upper_tail(n, delta, mid) <= eps_sq) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  double c = static_cast<double>(hi) / static_cast<double>(n) - delta;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  while (c > 0.0 && tail_threshold(n, delta, c) > hi) c = std::nextafter(c, -kInf);
  while (tail_threshold(n, delta, c) < hi) c = std::nextafter(c, kInf);
  return c < 0.0 ? 0.0 : c;
}

double f_serf(double n_test, double n_key) {
  return n_key * n_test * n_test / ((n_key + n_test) * (n_test + 1.0));
}

double gamma_serf(double n_test, double n_key, double eps_sq) {
  check_eps_sq(eps_sq);
  if (!(n_test > 0.0) || !(n_key > 0.0)) {
    throw degenerate_input("gamma_serf needs n_test > 0 and n_key > 0");
  }
  return std::sqrt(std::log(1.0 / eps_sq) / f_serf(n_test, n_key));
}

double hoeffding_decoy_dev(double n_outcome, double eps_sq) {
  check_eps_sq(eps_sq);
  if (!(n_outcome >= 0.0)) throw domain_error("n_outcome must be nonnegative");
  return std::sqrt(0.5 * n_outcome * std::log(2.0 / eps_sq));
}

}  // namespace mmqkd
