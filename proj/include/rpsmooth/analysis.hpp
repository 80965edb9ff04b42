#pragma once

#include "rpsmooth/estimators.hpp"
#include "rpsmooth/matops.hpp"
#include "rpsmooth/models.hpp"
#include "rpsmooth/parallel.hpp"

namespace rpsmooth {

/// Partitioned stationary covariance of the plant augmented with one filter,
/// and the resulting error covariance Sigma - M - M' + N.
struct FilterErrorCov {
  Mat sigma;  // E[x x']
  Mat m;      // E[x xhat']
  Mat n;      // E[xhat xhat']
  Mat error;
};

/// Solves the 2n x 2n Lyapunov equation of
///   [x; xhat]' = [[A_true, 0], [G C, F]] [x; xhat] + [[B, 0], [0, G]] [v; w].
FilterErrorCov filter_error_cov(const Mat& a_true, const Mat& b, const Mat& c, const FilterDesign& f);

/// E[e_f e_b'] = Sigma - M_f' - M_b + M_f' Sigma^-1 M_b.
Mat cross_cov(const Mat& sigma, const Mat& m_f, const Mat& m_b);

/// How robust smoother weights meet the 2x2 error matrices of the resonant
/// model. scalar_first takes the (1,1) entries of X, Y and of the error
/// matrices, then combines scalars; matrix_first combines full matrices with
/// k1 = (X+Y)^-1 X and takes the (1,1) entry at the end. The two agree for n = 1.
enum class CombineMode { scalar_first, matrix_first };

/// optimal: (sf sb - sfb^2) / (sf + sb - 2 sfb)
/// robust:  k1^2 sf + k2^2 sb + 2 k1 k2 sfb with scalar weights
double combine_smoother(EstimatorKind kind, double k1, double k2, double sf, double sb, double sfb);

/// (1,1) entry of k1 Ef k1' + k2 Eb k2' + k1 Efb k2' + k2 Efb' k1'.
double combine_smoother_matrix(const SmootherDesign& w, const Mat& ef, const Mat& eb, const Mat& efb);

/// Plant seen by the backward filter. same_process runs the backward filter
/// against the unreversed plant, which reproduces the reversed measurement
/// statistics but flips the sign of odd-parity states (velocity) in the
/// state/estimate correlation. time_reversed uses the reversed-time drift
/// Sigma A' Sigma^-1, exact for every entry. The two agree for n = 1 and on
/// every (1,1) filter error; they differ in the cross term for n > 1.
enum class BackwardPlant { same_process, time_reversed };

/// Drift of the stationary plant run in reversed time, Sigma A' Sigma^-1
/// with A Sigma + Sigma A' + B B' = 0.
Mat reversed_drift(const Mat& a, const Mat& b);

struct AnalysisOptions {
  CombineMode combine = CombineMode::scalar_first;
  BackwardPlant backward_plant = BackwardPlant::same_process;
  double fp_tol = 1e-6;
  int fp_max_iter = 200;
};

struct ErrorReport {
  double sigma_f_sq = 0.0;
  double sigma_b_sq = 0.0;
  double sigma_fb_sq = 0.0;
  double sigma_sq = 0.0;
  double R_sq_converged = 0.0;
  int fixed_point_iters = 0;
  double delta = 0.0;
  double mu = 0.0;
  EstimatorKind kind = EstimatorKind::optimal;
  // Scalar combination weights actually applied (NaN under matrix_first).
  double k1 = 0.0;
  double k2 = 0.0;
  Mat error_f;
  Mat error_b;
  Mat error_fb;
};

/// True mean-square errors of the estimator `kind` (designed on the nominal
/// model) against the plant perturbed by `delta`, with R_sq and the forward
/// error solved as a fixed point starting from sigma_f^2 = 0.
ErrorReport evaluate_error(const ProcessModel& model, const UncertaintySpec& unc, const SqueezingConfig& sq,
                           EstimatorKind kind, double delta, const AnalysisOptions& opts = {});

struct WorstCase {
  double sigma_w_sq = 0.0;
  double delta_star = 0.0;
};

/// Maximum of evaluate_error over a uniform delta grid on [-1, 1]
/// (odd grid_size >= 3). Ties go to the smallest |delta|.
WorstCase worst_case_error(const ProcessModel& model, const UncertaintySpec& unc, const SqueezingConfig& sq,
                           EstimatorKind kind, int grid_size = 201, const AnalysisOptions& opts = {},
                           Exec exec = Exec::serial);

/// Argmax with the tie-break above; exposed for the sweep drivers.
WorstCase reduce_worst_case(std::span<const double> deltas, std::span<const double> values);

/// 10 log10(optimal / robust).
double improvement_db(double sigma_w_optimal, double sigma_w_robust);

}  // namespace rpsmooth
