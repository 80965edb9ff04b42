#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rpsmooth/error.hpp"
#include "rpsmooth/estimators.hpp"

#include <cmath>

using namespace rpsmooth;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
double rel(const Mat& a, const Mat& b) { return (a - b).norm() / b.norm(); }

struct OuCase {
  double lambda, kappa, alpha_sq, r_sq, mu;
  double c() const { return 2.0 * std::sqrt(alpha_sq) / std::sqrt(r_sq); }
  // sqrt(lambda^2 + 4 kappa |alpha|^2 / R)
  double root() const { return std::sqrt(lambda * lambda + kappa * c() * c()); }
  // Same with the uncertainty term.
  double L() const { return std::sqrt(lambda * lambda * (1.0 - mu * mu) + kappa * c() * c()); }
};

OuCase random_case(oracle::Rand& rnd) {
  return OuCase{std::pow(10.0, rnd.uniform(3.0, 5.0)), std::pow(10.0, rnd.uniform(3.0, 5.0)),
                std::pow(10.0, rnd.uniform(4.0, 7.0)), rnd.uniform(0.1, 10.0), rnd.uniform(0.0, 0.95)};
}

}  // namespace

TEST_CASE("optimal OU filters match the scalar closed forms on 100 random tuples") {
  oracle::Rand rnd(21);
  for (int trial = 0; trial < 100; ++trial) {
    const OuCase t = random_case(rnd);
    CAPTURE(trial);
    const ProcessModel m = build_ou(t.lambda, t.kappa);
    const FilterPair f = design_optimal_filters(m, measurement_row(t.alpha_sq, t.r_sq, 1));
    const double c = t.c();
    // Cancellation-free forms of (R / 4|alpha|^2)(-+lambda + root).
    const double p_f = t.kappa / (t.lambda + t.root());
    const double p_b = (t.lambda + t.root()) / (c * c);
    CHECK(rel(f.fwd.cov(0, 0), p_f) < 1e-12);
    CHECK(rel(f.bwd.cov(0, 0), p_b) < 1e-12);
    // Gains K_f, K_b and the filter dynamics.
    CHECK(rel(f.fwd.G(0, 0), p_f * c) < 1e-12);
    CHECK(rel(f.bwd.G(0, 0), p_b * c) < 1e-12);
    CHECK(rel(f.fwd.F(0, 0), -t.root()) < 1e-12);
    CHECK(rel(f.bwd.F(0, 0), -t.root()) < 1e-12);
    // Smoother: kappa / (2 root).
    CHECK(rel(optimal_smoother_cov(f.fwd.cov, f.bwd.cov)(0, 0), t.kappa / (2.0 * t.root())) < 1e-12);
  }
}

TEST_CASE("robust OU filters match the scalar closed forms on 100 random tuples") {
  oracle::Rand rnd(22);
  for (int trial = 0; trial < 100; ++trial) {
    const OuCase t = random_case(rnd);
    CAPTURE(trial);
    const ProcessModel m = build_ou(t.lambda, t.kappa);
    // Y > 0 needs the measurement to outweigh the uncertainty.
    if (t.kappa * t.c() * t.c() <= 1.01 * t.mu * t.mu * t.lambda * t.lambda) {
      bool rejected = false;
      try {
        design_robust_filters(m, make_uncertainty(m, t.mu), measurement_row(t.alpha_sq, t.r_sq, 1));
      } catch (const Error& e) {
        rejected = e.kind() == ErrorKind::NoAdmissibleSolution;
      }
      CHECK(rejected);
      continue;
    }
    const RobustDesign r = design_robust_filters(m, make_uncertainty(m, t.mu), measurement_row(t.alpha_sq, t.r_sq, 1));
    const double L = t.L();
    const double c = t.c();
    CHECK(rel(r.fwd.cov(0, 0), (t.lambda + L) / t.kappa) < 1e-12);
    // Y = (L - lambda) / kappa = c^2 (1 - mu^2 lambda^2 / (kappa c^2)) / (L + lambda), cancellation-free.
    const double y = (L * L - t.lambda * t.lambda) / (t.kappa * (L + t.lambda));
    CHECK(rel(r.bwd.cov(0, 0), y) < 1e-11);
    CHECK(rel(r.fwd.F(0, 0), -L) < 1e-12);
    CHECK(rel(r.bwd.F(0, 0), -L) < 1e-12);
    CHECK(rel(r.fwd.G(0, 0), t.kappa * c / (t.lambda + L)) < 1e-12);
    CHECK(rel(r.bwd.G(0, 0), c / y) < 1e-11);
    CHECK(rel(r.smoother.k1(0, 0), r.fwd.cov(0, 0) / (r.fwd.cov(0, 0) + r.bwd.cov(0, 0))) < 1e-14);
  }
}

TEST_CASE("OU backward dynamics coefficient is -root") {
  const OuCase t{5.9e4, 1.9e4, 1e6, 0.5, 0.0};
  const FilterPair f = design_optimal_filters(build_ou(t.lambda, t.kappa), measurement_row(t.alpha_sq, t.r_sq, 1));
  const double k_b = std::sqrt(t.r_sq) / (2.0 * std::sqrt(t.alpha_sq)) * (t.lambda + t.root());
  CHECK(rel(t.lambda - 2.0 * std::sqrt(t.alpha_sq) * k_b / std::sqrt(t.r_sq), -t.root()) < 1e-14);
  CHECK(rel(f.bwd.F(0, 0), -t.root()) < 1e-12);
}

TEST_CASE("robust filters reduce to the Kalman filters at zero uncertainty") {
  for (const ProcessModel& m : {build_ou(5.9e4, 1.9e4), build_resonant(9e4, 0.1, 6.283e3)}) {
    const Mat c = measurement_row(m.n == 1 ? 1e6 : 25e4, 0.7, m.n);
    const FilterPair k = design_optimal_filters(m, c);
    const RobustDesign r = design_robust_filters(m, make_uncertainty(m, 0.0), c);
    CAPTURE(m.n);
    CHECK(rel(r.fwd.F, k.fwd.F) < 1e-9);
    CHECK(rel(r.fwd.G, k.fwd.G) < 1e-9);
    CHECK(rel(r.bwd.F, k.bwd.F) < 1e-9);
    CHECK(rel(r.bwd.G, k.bwd.G) < 1e-9);
    CHECK(rel(Mat(r.fwd.cov.inverse()), k.fwd.cov) < 1e-9);
    CHECK(rel(Mat(r.bwd.cov.inverse()), k.bwd.cov) < 1e-9);
  }
}

TEST_CASE("OU robust deviation grows monotonically with the uncertainty level") {
  const ProcessModel m = build_ou(5.9e4, 1.9e4);
  const Mat c = measurement_row(1e6, 0.7, 1);
  const double kalman_gain = design_optimal_filters(m, c).fwd.G(0, 0);
  double prev_x = 0.0, prev_dev = -1.0, prev_L = 1e300;
  for (int i = 0; i <= 9; ++i) {
    const double mu = 0.1 * i;
    const RobustDesign r = design_robust_filters(m, make_uncertainty(m, mu), c);
    const double L = -r.fwd.F(0, 0);
    const double dev = std::abs(r.fwd.G(0, 0) - kalman_gain);
    CAPTURE(mu);
    if (i == 0) CHECK(dev <= 1e-9 * kalman_gain);
    if (i > 0) {
      CHECK(L < prev_L);
      CHECK(r.fwd.cov(0, 0) < prev_x);  // X = (lambda + L) / kappa falls with L
      CHECK(dev > prev_dev);
    }
    prev_L = L, prev_x = r.fwd.cov(0, 0), prev_dev = dev;
  }
}

TEST_CASE("robust resonant design at mu = 0.8") {
  const ProcessModel m = build_resonant(9e4, 0.1, 6.283e3);
  const UncertaintySpec u = make_uncertainty(m, 0.8);
  const Mat c = measurement_row(25e4, 1.0, 2);
  const RobustDesign r = design_robust_filters(m, u, c);
  const Mat w = u.B1 * u.B1.transpose();
  const Mat mm = u.K.transpose() * u.K - c.transpose() * c;
  CHECK(is_positive_definite(r.fwd.cov));
  CHECK(is_positive_definite(r.bwd.cov));
  const double scale = 1.0 + mm.norm() + m.A.norm() * r.fwd.cov.norm();
  CHECK(robust_are_residual(m.A, w, mm, Branch::forward, r.fwd.cov).norm() < 1e-10 * scale);
  CHECK(robust_are_residual(m.A, w, mm, Branch::backward, r.bwd.cov).norm() <
        1e-10 * (1.0 + mm.norm() + m.A.norm() * r.bwd.cov.norm()));
  CHECK(rel(Mat(r.smoother.k1 + r.smoother.k2), Mat(Mat::Identity(2, 2))) < 1e-14);
  CHECK(is_hurwitz(r.fwd.F));
  CHECK(is_hurwitz(r.bwd.F));
}

TEST_CASE("robust design fails when the uncertainty cannot be absorbed") {
  // Weak measurement and mu near 1 leave no positive definite X.
  const ProcessModel m = build_resonant(9e4, 0.1, 6.283e3);
  bool failed = false;
  try {
    design_robust_filters(m, make_uncertainty(m, 0.95), measurement_row(1.0, 1.0, 2));
  } catch (const Error& e) {
    failed = e.kind() == ErrorKind::NoAdmissibleSolution;
  }
  CHECK(failed);
}

TEST_CASE("optimal smoother covariance") {
  const Mat p = make_mat(1, 1, {0.3});
  CHECK(optimal_smoother_cov(p, p)(0, 0) == doctest::Approx(0.15).epsilon(1e-15));

  // Resonant nominal at R = 1 against the ODE-integrated filter covariances.
  const ProcessModel m = build_resonant(9e4, 0.1, 6.283e3);
  const Mat c = measurement_row(25e4, 1.0, 2);
  const FilterPair f = design_optimal_filters(m, c);
  const Mat s = -c.transpose() * c;
  const Mat pf = oracle::riccati_ode(m.A, s, m.B * m.B.transpose(), 2e-7, 0.2);
  const Mat pb = oracle::riccati_ode(-m.A, s, m.B * m.B.transpose(), 2e-7, 0.2);
  CHECK(rel(f.fwd.cov, pf) < 1e-8);
  CHECK(rel(f.bwd.cov, pb) < 1e-8);
  const Mat ps = (pf.inverse() + pb.inverse()).inverse();
  CHECK(rel(optimal_smoother_cov(f.fwd.cov, f.bwd.cov), ps) < 1e-8);

  bool singular = false;
  try {
    optimal_smoother_cov(make_mat(1, 1, {0.0}), p);
  } catch (const Error& e) {
    singular = e.kind() == ErrorKind::SingularInput;
  }
  CHECK(singular);
}

TEST_CASE("robust combination") {
  const Mat k1 = make_mat(1, 1, {0.75});
  const Mat k2 = make_mat(1, 1, {0.25});
  CHECK(robust_combine(k1, k2, Vec::Constant(1, 0.0), Vec::Constant(1, 4.0))(0) == 1.0);

  const ProcessModel m = build_resonant(9e4, 0.1, 6.283e3);
  const RobustDesign r = design_robust_filters(m, make_uncertainty(m, 0.8), measurement_row(25e4, 1.0, 2));
  const Vec v = (Vec(2) << 0.3, -20.0).finished();
  CHECK((robust_combine(r.smoother.k1, r.smoother.k2, v, v) - v).norm() < 1e-12 * v.norm());

  const Vec xf = (Vec(2) << 0.1, 5.0).finished();
  const Vec xb = (Vec(2) << -0.2, 7.0).finished();
  const Mat x = r.fwd.cov, y = r.bwd.cov;
  const Vec direct = (x + y).fullPivLu().solve(x * xf + y * xb);
  CHECK((robust_combine(r.smoother.k1, r.smoother.k2, xf, xb) - direct).norm() < 1e-10 * direct.norm());

  bool bad = false;
  try {
    robust_combine(k1, k2, v, v);
  } catch (const Error& e) {
    bad = e.kind() == ErrorKind::InvalidParam;
  }
  CHECK(bad);
}
