#include "mmqkd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmqkd/error.hpp"

namespace mmqkd {

namespace {

Eigen::SelfAdjointEigenSolver<Mat> solve(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) {
    throw numeric_error("symmetric eigen-decomposition failed (dimension " +
                        std::to_string(m.rows()) + ")");
  }
  return es;
}

// V diag(f(λ)) V^T
template <typename F>
Mat spectral_map(const Mat& m, F f) {
  const auto es = solve(m);
  Vec lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = f(lam(i));
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Mat sqrt_psd(const Mat& m) {
  return spectral_map(m, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

Mat pinv_sqrt_psd(const Mat& m, double tol) {
  return spectral_map(m, [tol](double x) { return x > tol ? 1.0 / std::sqrt(x) : 0.0; });
}

Mat support_projector(const Mat& m, double tol) {
  return spectral_map(m, [tol](double x) { return x > tol ? 1.0 : 0.0; });
}

double norm_inf_sym(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return solve(m).eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Mat& m) { return solve(m).eigenvalues().minCoeff(); }

double max_eigenvalue(const Mat& m) { return solve(m).eigenvalues().maxCoeff(); }

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace mmqkd
