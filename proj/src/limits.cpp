#include "rpsmooth/limits.hpp"

#include "rpsmooth/error.hpp"
#include "rpsmooth/estimators.hpp"

namespace rpsmooth {

double compute_csl(const ProcessModel& model, const UncertaintySpec& unc, double alpha_sq, double delta) {
  ProcessModel matched = model;
  matched.A = apply_uncertainty(model, unc, delta);
  const Mat c = measurement_row(alpha_sq, 1.0, model.n);
  const FilterPair f = design_optimal_filters(matched, c);
  return optimal_smoother_cov(f.fwd.cov, f.bwd.cov)(0, 0);
}

double compute_sql(const ProcessModel& model, const UncertaintySpec& unc, double alpha_sq, double delta) {
  if (!(alpha_sq > 0.0)) throw Error(ErrorKind::InvalidParam, "alpha_sq must be positive");
  const Mat a_true = apply_uncertainty(model, unc, delta);
  Mat c = Mat::Zero(1, model.n);
  c(0, 0) = 1.0;
  // D = [1, 1] / (2 |alpha|) with unit-intensity nu_1, nu_2.
  const Mat r = Mat::Constant(1, 1, 1.0 / (2.0 * alpha_sq));
  const Mat p = solve_filter_are(a_true, model.B, c, Mat::Identity(1, 1), r);
  return p(0, 0);
}

BaselineCurve baseline_curve(BaselineKind kind, const ProcessModel& model, const UncertaintySpec& unc,
                             double alpha_sq, const std::vector<double>& deltas) {
  BaselineCurve out;
  out.kind = kind;
  out.deltas = deltas;
  out.values.reserve(deltas.size());
  for (double d : deltas) {
    out.values.push_back(kind == BaselineKind::csl ? compute_csl(model, unc, alpha_sq, d)
                                                   : compute_sql(model, unc, alpha_sq, d));
  }
  return out;
}

}  // namespace rpsmooth
