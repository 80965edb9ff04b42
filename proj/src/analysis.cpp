#include "rpsmooth/analysis.hpp"

#include "rpsmooth/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rpsmooth {

namespace {

struct Designed {
  FilterPair filters;
  SmootherDesign smoother;  // robust only
};

Designed design(EstimatorKind kind, const ProcessModel& model, const UncertaintySpec& unc, const Mat& c) {
  if (kind == EstimatorKind::optimal) return Designed{design_optimal_filters(model, c), {}};
  RobustDesign r = design_robust_filters(model, unc, c);
  return Designed{FilterPair{std::move(r.fwd), std::move(r.bwd)}, std::move(r.smoother)};
}

}  // namespace

FilterErrorCov filter_error_cov(const Mat& a_true, const Mat& b, const Mat& c, const FilterDesign& f) {
  const Eigen::Index n = a_true.rows();
  if (f.F.rows() != n || f.G.rows() != n || c.cols() != n || b.rows() != n) {
    throw Error(ErrorKind::InvalidParam, "augmented system dimensions are inconsistent");
  }
  const Eigen::Index nb = b.cols();
  const Eigen::Index nw = f.G.cols();

  Mat a_aug = Mat::Zero(2 * n, 2 * n);
  a_aug.topLeftCorner(n, n) = a_true;
  a_aug.bottomLeftCorner(n, n) = f.plant_coupling(c);
  a_aug.bottomRightCorner(n, n) = f.F;

  Mat b_aug = Mat::Zero(2 * n, nb + nw);
  b_aug.topLeftCorner(n, nb) = b;
  b_aug.bottomRightCorner(n, nw) = f.G;

  const Mat cs = solve_lyapunov(a_aug, b_aug * b_aug.transpose());

  FilterErrorCov out;
  out.sigma = cs.topLeftCorner(n, n);
  out.m = cs.topRightCorner(n, n);
  out.n = cs.bottomRightCorner(n, n);
  out.error = symmetrize(out.sigma - out.m - out.m.transpose() + out.n);
  return out;
}

Mat reversed_drift(const Mat& a, const Mat& b) {
  const Mat sigma = solve_lyapunov(a, b * b.transpose());
  Eigen::FullPivLU<Mat> lu(sigma);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularSigma, "plant covariance is singular");
  // Sigma A' Sigma^-1 = (Sigma^-1 A Sigma)' with Sigma symmetric.
  return lu.solve(a * sigma).transpose();
}

Mat cross_cov(const Mat& sigma, const Mat& m_f, const Mat& m_b) {
  Eigen::FullPivLU<Mat> lu(sigma);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularSigma, "plant covariance is singular");
  return sigma - m_f.transpose() - m_b + m_f.transpose() * lu.solve(m_b);
}

double combine_smoother(EstimatorKind kind, double k1, double k2, double sf, double sb, double sfb) {
  if (kind == EstimatorKind::optimal) {
    const double den = sf + sb - 2.0 * sfb;
    if (!(den > 0.0)) throw Error(ErrorKind::DegenerateDenominator, "sf + sb - 2 sfb must be positive");
    return (sf * sb - sfb * sfb) / den;
  }
  return k1 * k1 * sf + k2 * k2 * sb + 2.0 * k1 * k2 * sfb;
}

double combine_smoother_matrix(const SmootherDesign& w, const Mat& ef, const Mat& eb, const Mat& efb) {
  const Mat s = w.k1 * ef * w.k1.transpose() + w.k2 * eb * w.k2.transpose() + w.k1 * efb * w.k2.transpose() +
                w.k2 * efb.transpose() * w.k1.transpose();
  return s(0, 0);
}

ErrorReport evaluate_error(const ProcessModel& model, const UncertaintySpec& unc, const SqueezingConfig& sq,
                           EstimatorKind kind, double delta, const AnalysisOptions& opts) {
  const Mat a_true = apply_uncertainty(model, unc, delta);

  double sf = 0.0;
  double last_step = 0.0;
  int alternations = 0;
  bool converged = false;
  int iter = 0;
  double r_sq = 0.0;
  Mat c;
  Designed d;
  FilterErrorCov fwd;

  for (iter = 1; iter <= opts.fp_max_iter; ++iter) {
    try {
      r_sq = compute_R_sq(sf, sq.r_m, sq.r_p);
    } catch (const Error& e) {
      throw Error(ErrorKind::FixedPointDiverged, e.what());
    }
    c = measurement_row(sq.alpha_sq, r_sq, model.n);
    d = design(kind, model, unc, c);
    fwd = filter_error_cov(a_true, model.B, c, d.filters.fwd);

    const double next = fwd.error(0, 0);
    if (!(next >= 0.0 && next <= 1.0)) {
      throw Error(ErrorKind::FixedPointDiverged, "forward error " + std::to_string(next) + " left [0, 1]");
    }
    const double step = next - sf;
    if (std::abs(step) < opts.fp_tol) {
      converged = true;
      break;
    }
    alternations = (last_step != 0.0 && (step > 0.0) != (last_step > 0.0)) ? alternations + 1 : 0;
    last_step = step;
    // Damp a sign-alternating update by averaging successive iterates.
    sf = alternations >= 3 ? 0.5 * (sf + next) : next;
  }
  if (!converged) {
    throw Error(ErrorKind::FixedPointDiverged,
                "no convergence in " + std::to_string(opts.fp_max_iter) + " iterations");
  }

  const Mat a_bwd = opts.backward_plant == BackwardPlant::time_reversed ? reversed_drift(a_true, model.B) : a_true;
  const FilterErrorCov bwd = filter_error_cov(a_bwd, model.B, c, d.filters.bwd);
  const Mat efb = cross_cov(fwd.sigma, fwd.m, bwd.m);

  ErrorReport rep;
  rep.kind = kind;
  rep.delta = delta;
  rep.mu = unc.mu;
  rep.R_sq_converged = r_sq;
  rep.fixed_point_iters = iter;
  rep.error_f = fwd.error;
  rep.error_b = bwd.error;
  rep.error_fb = efb;
  rep.sigma_f_sq = fwd.error(0, 0);
  rep.sigma_b_sq = bwd.error(0, 0);
  rep.sigma_fb_sq = efb(0, 0);

  const double sf1 = rep.sigma_f_sq;
  const double sb1 = rep.sigma_b_sq;
  const double sfb1 = rep.sigma_fb_sq;
  if (kind == EstimatorKind::optimal) {
    rep.sigma_sq = combine_smoother(kind, 0.0, 0.0, sf1, sb1, sfb1);
    // Minimum-variance weights of two correlated estimates, the combination
    // that the closed form above evaluates.
    rep.k1 = (sb1 - sfb1) / (sf1 + sb1 - 2.0 * sfb1);
    rep.k2 = 1.0 - rep.k1;
  } else if (opts.combine == CombineMode::scalar_first || model.n == 1) {
    const double x11 = d.filters.fwd.cov(0, 0);
    const double y11 = d.filters.bwd.cov(0, 0);
    rep.k1 = x11 / (x11 + y11);
    rep.k2 = y11 / (x11 + y11);
    rep.sigma_sq = combine_smoother(kind, rep.k1, rep.k2, sf1, sb1, sfb1);
  } else {
    rep.k1 = std::numeric_limits<double>::quiet_NaN();
    rep.k2 = std::numeric_limits<double>::quiet_NaN();
    rep.sigma_sq = combine_smoother_matrix(d.smoother, fwd.error, bwd.error, efb);
  }
  return rep;
}

WorstCase reduce_worst_case(std::span<const double> deltas, std::span<const double> values) {
  WorstCase best{-std::numeric_limits<double>::infinity(), 0.0};
  bool first = true;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double v = values[i];
    const double dl = deltas[i];
    const bool better = first || v > best.sigma_w_sq ||
                        (v == best.sigma_w_sq && (std::abs(dl) < std::abs(best.delta_star) ||
                                                  (std::abs(dl) == std::abs(best.delta_star) && dl < best.delta_star)));
    if (better) {
      best = WorstCase{v, dl};
      first = false;
    }
  }
  return best;
}

WorstCase worst_case_error(const ProcessModel& model, const UncertaintySpec& unc, const SqueezingConfig& sq,
                           EstimatorKind kind, int grid_size, const AnalysisOptions& opts, Exec exec) {
  if (grid_size < 3 || grid_size % 2 == 0) {
    throw Error(ErrorKind::InvalidParam, "worst-case grid size must be odd and at least 3");
  }
  const std::vector<double> deltas = linear_grid(-1.0, 1.0, grid_size);
  const auto results = grid_map<double>(exec, deltas, [&](double delta) {
    return evaluate_error(model, unc, sq, kind, delta, opts).sigma_sq;
  });

  std::vector<double> values(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok()) results[i].rethrow();
    values[i] = *results[i].value;
  }
  return reduce_worst_case(deltas, values);
}

double improvement_db(double sigma_w_optimal, double sigma_w_robust) {
  return 10.0 * std::log10(sigma_w_optimal / sigma_w_robust);
}

}  // namespace rpsmooth
