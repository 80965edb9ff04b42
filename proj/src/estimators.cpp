#include "rpsmooth/estimators.hpp"

#include "rpsmooth/error.hpp"

namespace rpsmooth {

namespace {

void check_measurement(const ProcessModel& model, const Mat& c) {
  if (c.rows() != 1 || c.cols() != model.n) {
    throw Error(ErrorKind::InvalidParam, "measurement row must be 1 x n");
  }
  require_finite(c, "measurement row");
}

}  // namespace

FilterPair design_optimal_filters(const ProcessModel& model, const Mat& c) {
  check_measurement(model, c);
  const Mat unit = Mat::Identity(1, 1);

  FilterPair out;
  const Mat p_f = solve_filter_are(model.A, model.B, c, unit, unit);
  const Mat k_f = p_f * c.transpose();
  out.fwd = FilterDesign{model.A - k_f * c, k_f, p_f, Direction::forward, EstimatorKind::optimal};

  const Mat p_b = solve_filter_are(-model.A, -model.B, c, unit, unit);
  const Mat k_b = p_b * c.transpose();
  out.bwd = FilterDesign{-model.A - k_b * c, k_b, p_b, Direction::backward, EstimatorKind::optimal};
  return out;
}

Mat optimal_smoother_cov(const Mat& p_f, const Mat& p_b) {
  if (!is_positive_definite(p_f) || !is_positive_definite(p_b)) {
    throw Error(ErrorKind::SingularInput, "filter covariances must be positive definite");
  }
  return symmetrize((p_f.inverse() + p_b.inverse()).inverse());
}

RobustDesign design_robust_filters(const ProcessModel& model, const UncertaintySpec& unc, const Mat& c) {
  check_measurement(model, c);
  const Mat& a = model.A;
  const Mat w = unc.B1 * unc.B1.transpose();
  const Mat m = unc.K.transpose() * unc.K - c.transpose() * c;

  const Mat x = solve_robust_are(a, w, m, Branch::forward);
  const Mat y = solve_robust_are(a, w, m, Branch::backward);

  Eigen::LLT<Mat> x_llt(x);
  Eigen::LLT<Mat> y_llt(y);

  RobustDesign out;
  // eta' = -(A + W X)' eta + C' theta, xhat_f = X^-1 eta.
  out.fwd.F = -x_llt.solve((a + w * x).transpose() * x);
  out.fwd.G = x_llt.solve(c.transpose());
  out.fwd.cov = x;
  out.fwd.direction = Direction::forward;
  out.fwd.kind = EstimatorKind::robust;

  // In reverse time q: xi' = (A - W Y)' xi + C' theta, xhat_b = Y^-1 xi.
  out.bwd.F = y_llt.solve((a - w * y).transpose() * y);
  out.bwd.G = y_llt.solve(c.transpose());
  out.bwd.cov = y;
  out.bwd.direction = Direction::backward;
  out.bwd.kind = EstimatorKind::robust;

  const Eigen::PartialPivLU<Mat> sum_lu(x + y);
  out.smoother = SmootherDesign{sum_lu.solve(x), sum_lu.solve(y), EstimatorKind::robust};
  return out;
}

Vec robust_combine(const Mat& k1, const Mat& k2, const Vec& xf_hat, const Vec& xb_hat) {
  if (k1.cols() != xf_hat.size() || k2.cols() != xb_hat.size() || k1.rows() != k2.rows()) {
    throw Error(ErrorKind::InvalidParam, "weight and estimate dimensions differ");
  }
  return k1 * xf_hat + k2 * xb_hat;
}

}  // namespace rpsmooth
