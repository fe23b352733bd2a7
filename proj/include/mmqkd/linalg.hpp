#pragma once

#include <Eigen/Dense>

namespace mmqkd {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// All helpers take real symmetric input and throw numeric_error if the
// eigen-solver does not converge.

// Square root; eigenvalues below zero (round-off) are clamped to 0.
Mat sqrt_psd(const Mat& m);

// (sqrt m)^+ with eigenvalues <= tol treated as zero.
Mat pinv_sqrt_psd(const Mat& m, double tol);

// Projector onto eigenvectors with eigenvalue > tol.
Mat support_projector(const Mat& m, double tol);

// Largest absolute eigenvalue (operator norm of a symmetric matrix).
double norm_inf_sym(const Mat& m);

double min_eigenvalue(const Mat& m);
double max_eigenvalue(const Mat& m);

Mat kron(const Mat& a, const Mat& b);

}  // namespace mmqkd
