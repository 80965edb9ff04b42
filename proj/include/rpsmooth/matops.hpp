#pragma once

#include <Eigen/Dense>

#include <initializer_list>

namespace rpsmooth {

/// Dense real matrix. All matrices in this library are small (n <= 8 for
/// process states, 2n for augmented systems).
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr Eigen::Index kMaxStateDim = 8;

/// Row-major construction with shape and finiteness checks.
Mat make_mat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<double> row_major);

/// Throws InvalidParam if any entry is NaN or infinite.
void require_finite(const Mat& m, const char* what);

Mat symmetrize(const Mat& s);

/// Eigenvalues after diagonal balancing, with a complex QR fallback when the
/// real iteration fails to converge. Throws IllConditioned if both fail.
Eigen::VectorXcd eigenvalues(const Mat& a);
double max_real_eigenvalue(const Mat& a);
double min_real_eigenvalue(const Mat& a);
bool is_hurwitz(const Mat& a);
bool is_positive_definite(const Mat& s);

enum class Branch { forward, backward };

/// Stabilizing solution of the filter Riccati equation
///   A P + P A' - P C' R^-1 C P + B N B' = 0,
/// i.e. A - P C' R^-1 C is Hurwitz.
Mat solve_filter_are(const Mat& a, const Mat& b, const Mat& c, const Mat& n_cov, const Mat& r_meas);

/// Riccati pair of the robust smoother.
///   forward:  X A + A' X + X W X + M = 0,  eig(A + W X) in the open right half plane
///   backward: Y A + A' Y - Y W Y - M = 0,  A - W Y Hurwitz
/// The result must be positive definite; otherwise NoAdmissibleSolution.
Mat solve_robust_are(const Mat& a, const Mat& w, const Mat& m, Branch branch);

/// Symmetric C with A C + C A' + Q = 0. A must be Hurwitz.
Mat solve_lyapunov(const Mat& a, const Mat& q);

/// Residual helpers, exposed for tests and diagnostics.
Mat filter_are_residual(const Mat& a, const Mat& b, const Mat& c, const Mat& n_cov, const Mat& r_meas,
                        const Mat& p);
Mat robust_are_residual(const Mat& a, const Mat& w, const Mat& m, Branch branch, const Mat& x);

namespace detail {

/// Solves A Z + Z A' + Q = 0 for symmetric Z by eliminating the n(n+1)/2
/// independent entries. Only requires lambda_i + lambda_j != 0; returns false
/// when the reduced system is singular.
bool lyapunov_elimination(const Mat& a, const Mat& q, Mat& z);

}  // namespace detail

}  // namespace rpsmooth
