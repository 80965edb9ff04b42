#pragma once

#include "rpsmooth/models.hpp"

#include <vector>

namespace rpsmooth {

enum class BaselineKind { csl, sql };

struct BaselineCurve {
  std::vector<double> deltas;
  std::vector<double> values;
  BaselineKind kind = BaselineKind::csl;
};

/// Coherent state limit: optimal smoother redesigned on the perturbed plant,
/// coherent beam (R_sq = 1). Returns the (1,1) entry of the smoothed covariance.
double compute_csl(const ProcessModel& model, const UncertaintySpec& unc, double alpha_sq, double delta);

/// Standard quantum limit: Kalman filter (not smoother) of the perturbed
/// plant observed through the linearised dual-homodyne output
///   theta = x_1 + (nu_1 + nu_2) / (2 |alpha|),
/// i.e. measurement noise intensity 1 / (2 |alpha|^2).
double compute_sql(const ProcessModel& model, const UncertaintySpec& unc, double alpha_sq, double delta);

BaselineCurve baseline_curve(BaselineKind kind, const ProcessModel& model, const UncertaintySpec& unc,
                             double alpha_sq, const std::vector<double>& deltas);

}  // namespace rpsmooth
