#pragma once

// Independent reference computations used by the tests. None of these call
// the library's solvers.

#include "rpsmooth/matops.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

using rpsmooth::Mat;
using CMat = Eigen::MatrixXcd;

/// Classical RK4 for a matrix ODE, integrated until every entry's change per
/// step falls below tol times its magnitude, or t_max is reached.
inline Mat integrate_to_steady(const std::function<Mat(const Mat&)>& rhs, Mat z, double h, double t_max,
                               double tol = 1e-16) {
  for (double t = 0.0; t < t_max; t += h) {
    const Mat k1 = rhs(z);
    const Mat k2 = rhs(z + 0.5 * h * k1);
    const Mat k3 = rhs(z + 0.5 * h * k2);
    const Mat k4 = rhs(z + h * k3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (((k1.array().abs() * h) <= tol * z.array().abs()).all()) break;
  }
  return z;
}

/// Steady state of P' = A P + P A' + P S P + Q from P(0) = 0. S = -C'R^-1C gives
/// the Kalman filter Riccati equation; S = K'K - C'C the robust one in
/// covariance form.
inline Mat riccati_ode(const Mat& a, const Mat& s, const Mat& q, double h, double t_max) {
  return integrate_to_steady([&](const Mat& p) { return Mat(a * p + p * a.transpose() + p * s * p + q); },
                             Mat::Zero(a.rows(), a.cols()), h, t_max);
}

/// Steady state of Z' = A Z + Z A' + Q from Z(0) = 0.
inline Mat lyapunov_ode(const Mat& a, const Mat& q, double h, double t_max) {
  return integrate_to_steady([&](const Mat& z) { return Mat(a * z + z * a.transpose() + q); },
                             Mat::Zero(a.rows(), a.cols()), h, t_max);
}

/// Direct vectorised solve (I (x) A + A (x) I) vec Z = -vec Q.
inline Mat lyapunov_kron(const Mat& a, const Mat& q) {
  const Eigen::Index n = a.rows();
  Mat big = Mat::Zero(n * n, n * n);
  const Mat id = Mat::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      big.block(i * n, j * n, n, n) += id(i, j) * a;
      big.block(i * n, j * n, n, n) += a(i, j) * id;
    }
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
  const Eigen::VectorXd z = big.fullPivLu().solve(rhs);
  return Eigen::Map<const Mat>(z.data(), n, n);
}

/// Stationary error moments of a causal and an anticausal linear estimator
/// of the first state component, computed by integrating the error spectra.
///   plant  x' = A x + B v,  theta = C x + w  (v, w unit white)
///   causal     xf' = Ff xf + Gf theta
///   anticausal -xb' = Fb xb + Gb theta
struct SpectralMoments {
  double ff = 0.0;
  double bb = 0.0;
  double fb = 0.0;
};

inline SpectralMoments spectral_moments(const Mat& a, const Mat& b, const Mat& c, const Mat& ff, const Mat& gf,
                                        const Mat& fb, const Mat& gb, double omega_scale, int panels = 6000) {
  using cd = std::complex<double>;
  const Eigen::Index n = a.rows();
  const CMat id = CMat::Identity(n, n);
  const CMat ac = a.cast<cd>(), bc = b.cast<cd>(), cc = c.cast<cd>();
  const CMat ffc = ff.cast<cd>(), gfc = gf.cast<cd>(), fbc = fb.cast<cd>(), gbc = gb.cast<cd>();

  // 8-point Gauss-Legendre on each panel of theta in [0, pi/2), omega = s tan(theta).
  static const double xg[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static const double wg[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  SpectralMoments m;
  const double width = (std::numbers::pi / 2.0) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (int k = 0; k < 8; ++k) {
      const double th = mid + 0.5 * width * xg[k];
      const double om = omega_scale * std::tan(th);
      const double jac = omega_scale / (std::cos(th) * std::cos(th));
      const cd jw(0.0, om);
      const CMat tx = (jw * id - ac).partialPivLu().solve(bc);
      const CMat hf = (jw * id - ffc).partialPivLu().solve(gfc);
      const CMat hb = (-jw * id - fbc).partialPivLu().solve(gbc);
      // Error transfer of component 1 from v and from w.
      const CMat ef_v = (id - hf * cc) * tx;
      const CMat eb_v = (id - hb * cc) * tx;
      const cd efw = -hf(0, 0);
      const cd ebw = -hb(0, 0);
      double sff = std::norm(efw), sbb = std::norm(ebw);
      double sfb = (efw * std::conj(ebw)).real();
      for (Eigen::Index j = 0; j < ef_v.cols(); ++j) {
        sff += std::norm(ef_v(0, j));
        sbb += std::norm(eb_v(0, j));
        sfb += (ef_v(0, j) * std::conj(eb_v(0, j))).real();
      }
      const double wgt = 0.5 * width * wg[k] * jac;
      m.ff += wgt * sff;
      m.bb += wgt * sbb;
      m.fb += wgt * sfb;
    }
  }
  // (1 / 2 pi) over the full line = (1 / pi) over the half line.
  m.ff /= std::numbers::pi;
  m.bb /= std::numbers::pi;
  m.fb /= std::numbers::pi;
  return m;
}

/// Reproducible random matrices for the property suites.
class Rand {
 public:
  explicit Rand(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Mat matrix(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = uniform(-scale, scale);
    return m;
  }

  /// Random matrix shifted so that every eigenvalue has real part <= -margin.
  Mat hurwitz(Eigen::Index n, double margin = 0.2) {
    Mat a = matrix(n, n);
    const double top = a.eigenvalues().real().maxCoeff();
    return a - (top + margin + uniform(0.0, 1.0)) * Mat::Identity(n, n);
  }

  Mat spd(Eigen::Index n, double floor = 0.1) {
    const Mat m = matrix(n, n);
    return m * m.transpose() + floor * Mat::Identity(n, n);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
