#pragma once

#include "rpsmooth/matops.hpp"
#include "rpsmooth/models.hpp"

namespace rpsmooth {

enum class Direction { forward, backward };
enum class EstimatorKind { optimal, robust };

/// Steady-state filter in estimate coordinates:
///   xhat' = F xhat + G theta,   theta = C x + w.
/// Backward filters are stored in their forward-time statistical form: the
/// same equation run over the time-reversed record.
///
/// For robust designs the Riccati recursion runs on eta = X xhat (forward) or
/// xi = Y xhat (backward); F here is that dynamics mapped to xhat, i.e.
/// F = -X^-1 (A + W X)' X and G = X^-1 C' for the forward filter.
struct FilterDesign {
  Mat F;
  Mat G;
  Mat cov;  // P_f / P_b for optimal, X / Y for robust
  Direction direction = Direction::forward;
  EstimatorKind kind = EstimatorKind::optimal;

  /// Plant-coupling block G C of the augmented system.
  Mat plant_coupling(const Mat& c) const { return G * c; }
};

struct SmootherDesign {
  Mat k1;
  Mat k2;
  EstimatorKind kind = EstimatorKind::robust;
};

struct FilterPair {
  FilterDesign fwd;
  FilterDesign bwd;
};

struct RobustDesign {
  FilterDesign fwd;
  FilterDesign bwd;
  SmootherDesign smoother;
};

/// Forward and backward Kalman filters of the nominal model with unit
/// process and measurement noise intensities.
FilterPair design_optimal_filters(const ProcessModel& model, const Mat& c);

/// (P_f^-1 + P_b^-1)^-1.
Mat optimal_smoother_cov(const Mat& p_f, const Mat& p_b);

/// Robust forward/backward filters and the ellipsoid-centre weights
/// k1 = (X + Y)^-1 X, k2 = (X + Y)^-1 Y. Uses Q = R = 1 and no known input.
RobustDesign design_robust_filters(const ProcessModel& model, const UncertaintySpec& unc, const Mat& c);

/// k1 xf + k2 xb.
Vec robust_combine(const Mat& k1, const Mat& k2, const Vec& xf_hat, const Vec& xb_hat);

}  // namespace rpsmooth
