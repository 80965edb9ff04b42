#include "rpsmooth/matops.hpp"

#include "rpsmooth/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace rpsmooth {

namespace {

void require_square(const Mat& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::InvalidParam, std::string(what) + " must be square and non-empty");
  }
  if (a.rows() > 2 * kMaxStateDim) {
    throw Error(ErrorKind::InvalidParam, std::string(what) + " exceeds the supported dimension");
  }
}

void require_symmetric(const Mat& s, const char* what) {
  const double scale = 1.0 + s.cwiseAbs().maxCoeff();
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::InvalidParam, std::string(what) + " must be symmetric");
  }
}

// Quadratic matrix equation in the common form
//   Z F + F' Z + Z G Z + H = 0,   closed loop F + G Z.
// All three Riccati equations of the library map onto it.
struct QuadraticAre {
  Mat f;
  Mat g;
  Mat h;
  bool closed_loop_stable;  // true: eig(F + G Z) < 0, false: eig(F + G Z) > 0

  Mat residual(const Mat& z) const { return z * f + f.transpose() * z + z * g * z + h; }
  Mat closed_loop(const Mat& z) const { return f + g * z; }
};

// Diagonal similarity that equalises row/column norms of the Hamiltonian
// blocks; the resonant model mixes entries of order 1 and 1e8.
Vec balancing_scale(const Mat& f) {
  const Eigen::Index n = f.rows();
  Vec d = Vec::Ones(n);
  Mat work = f;
  for (int sweep = 0; sweep < 20; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double col = 0.0;
      double row = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += std::abs(work(j, i));
        row += std::abs(work(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      const double s = std::sqrt(row / col);
      const double step = std::exp2(std::round(std::log2(s)));
      if (step != 1.0) {
        work.col(i) *= step;
        work.row(i) /= step;
        d(i) *= step;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return d;
}

// Invariant-subspace seed: columns of the Hamiltonian eigenvectors whose
// eigenvalues lie in the requested half plane.
bool hamiltonian_seed(const QuadraticAre& eq, Mat& z) {
  const Eigen::Index n = eq.f.rows();

  // Scale the state by D: Z = D^-1 Zs D^-1 with Fs = D^-1 F D.
  const Vec d = balancing_scale(eq.f);
  const Mat dm = d.asDiagonal();
  const Mat dinv = d.cwiseInverse().asDiagonal();
  const Mat fs = dinv * eq.f * dm;
  const Mat gs = dinv * eq.g * dinv;
  const Mat hs = dm * eq.h * dm;

  Mat ham(2 * n, 2 * n);
  ham << fs, gs, -hs, -fs.transpose();

  Eigen::VectorXcd lambda;
  Eigen::MatrixXcd vecs;
  Eigen::EigenSolver<Mat> es(ham, true);
  if (es.info() == Eigen::Success) {
    lambda = es.eigenvalues();
    vecs = es.eigenvectors();
  } else {
    // The real QR iteration occasionally stalls on these structured matrices.
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(ham.cast<std::complex<double>>(), true);
    if (ces.info() != Eigen::Success) return false;
    lambda = ces.eigenvalues();
    vecs = ces.eigenvectors();
  }
  const double scale = 1.0 + lambda.cwiseAbs().maxCoeff();

  std::vector<Eigen::Index> picked;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const double re = lambda(i).real();
    if (std::abs(re) <= 1e-13 * scale) return false;  // eigenvalue on the imaginary axis
    if ((re < 0.0) == eq.closed_loop_stable) picked.push_back(i);
  }
  if (static_cast<Eigen::Index>(picked.size()) != n) return false;

  Eigen::MatrixXcd u(2 * n, n);
  for (Eigen::Index k = 0; k < n; ++k) u.col(k) = vecs.col(picked[static_cast<std::size_t>(k)]);
  const Eigen::MatrixXcd u1 = u.topRows(n);
  const Eigen::MatrixXcd u2 = u.bottomRows(n);

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(u1);
  if (!lu.isInvertible()) return false;
  const Eigen::MatrixXcd zc = u2 * lu.inverse();
  const Mat zs = zc.real();
  z = symmetrize(dinv * zs * dinv);
  return z.allFinite();
}

// Newton (Kleinman-type) refinement. Each step solves the Lyapunov-type
// equation (F + G Z)' D + D (F + G Z) = -Res(Z).
Mat newton_polish(const QuadraticAre& eq, Mat z, double tol) {
  Mat best = z;
  double best_norm = eq.residual(z).norm();
  for (int iter = 0; iter < 40 && best_norm > 1e-3 * tol; ++iter) {
    const Mat res = eq.residual(z);
    const Mat acl = eq.closed_loop(z);
    Mat step;
    if (!detail::lyapunov_elimination(acl.transpose(), res, step)) break;
    z = symmetrize(z + step);
    const double norm = eq.residual(z).norm();
    if (!std::isfinite(norm)) break;
    if (norm < best_norm) {
      best = z;
      best_norm = norm;
    } else if (norm > 0.5 * best_norm && iter > 2) {
      break;
    }
  }
  return best;
}

bool branch_ok(const QuadraticAre& eq, const Mat& z) {
  const Mat acl = eq.closed_loop(z);
  return eq.closed_loop_stable ? max_real_eigenvalue(acl) < 0.0 : min_real_eigenvalue(acl) > 0.0;
}

}  // namespace

Mat make_mat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<double> row_major) {
  if (rows <= 0 || cols <= 0) throw Error(ErrorKind::InvalidParam, "matrix shape must be positive");
  if (static_cast<Eigen::Index>(row_major.size()) != rows * cols) {
    throw Error(ErrorKind::InvalidParam, "entry count does not match rows*cols");
  }
  Mat m(rows, cols);
  auto it = row_major.begin();
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = *it++;
  }
  require_finite(m, "matrix");
  return m;
}

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorKind::InvalidParam, std::string(what) + " has non-finite entries");
}

Mat symmetrize(const Mat& s) { return 0.5 * (s + s.transpose()); }

Eigen::VectorXcd eigenvalues(const Mat& a) {
  require_square(a, "eigenvalue input");
  if (!a.allFinite()) throw Error(ErrorKind::InvalidParam, "eigenvalue input has non-finite entries");
  if (a.size() == 1) return Eigen::VectorXcd::Constant(1, a(0, 0));
  const Vec d = balancing_scale(a);
  const Mat ab = d.cwiseInverse().asDiagonal() * a * d.asDiagonal();
  Eigen::EigenSolver<Mat> es(ab, false);
  if (es.info() == Eigen::Success) return es.eigenvalues();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(ab.cast<std::complex<double>>(), false);
  if (ces.info() == Eigen::Success) return ces.eigenvalues();
  throw Error(ErrorKind::IllConditioned, "eigenvalue iteration did not converge");
}

double max_real_eigenvalue(const Mat& a) { return eigenvalues(a).real().maxCoeff(); }

double min_real_eigenvalue(const Mat& a) { return eigenvalues(a).real().minCoeff(); }

bool is_hurwitz(const Mat& a) { return max_real_eigenvalue(a) < 0.0; }

bool is_positive_definite(const Mat& s) {
  Eigen::LLT<Mat> llt(symmetrize(s));
  return llt.info() == Eigen::Success;
}

namespace detail {

bool lyapunov_elimination(const Mat& a, const Mat& q, Mat& z) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = n * (n + 1) / 2;
  auto index = [n](Eigen::Index i, Eigen::Index j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  };

  Mat lhs = Mat::Zero(m, m);
  Vec rhs(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const Eigen::Index row = index(i, j);
      for (Eigen::Index k = 0; k < n; ++k) {
        lhs(row, index(k, j)) += a(i, k);
        lhs(row, index(i, k)) += a(j, k);
      }
      rhs(row) = -0.5 * (q(i, j) + q(j, i));
    }
  }

  // Row equilibration before the pivoted solve.
  for (Eigen::Index r = 0; r < m; ++r) {
    const double s = lhs.row(r).cwiseAbs().maxCoeff();
    if (s > 0.0) {
      lhs.row(r) /= s;
      rhs(r) /= s;
    }
  }

  Eigen::FullPivLU<Mat> lu(lhs);
  if (!lu.isInvertible()) return false;
  Vec sol = lu.solve(rhs);
  // One round of iterative refinement.
  sol += lu.solve(rhs - lhs * sol);
  if (!sol.allFinite()) return false;

  z.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      z(i, j) = sol(index(i, j));
      z(j, i) = z(i, j);
    }
  }
  return true;
}

}  // namespace detail

Mat filter_are_residual(const Mat& a, const Mat& b, const Mat& c, const Mat& n_cov, const Mat& r_meas,
                        const Mat& p) {
  const Mat rinv = r_meas.inverse();
  return a * p + p * a.transpose() - p * c.transpose() * rinv * c * p + b * n_cov * b.transpose();
}

Mat robust_are_residual(const Mat& a, const Mat& w, const Mat& m, Branch branch, const Mat& x) {
  if (branch == Branch::forward) return x * a + a.transpose() * x + x * w * x + m;
  return x * a + a.transpose() * x - x * w * x - m;
}

Mat solve_filter_are(const Mat& a, const Mat& b, const Mat& c, const Mat& n_cov, const Mat& r_meas) {
  require_square(a, "A");
  const Eigen::Index n = a.rows();
  if (n > kMaxStateDim) throw Error(ErrorKind::InvalidParam, "state dimension above 8");
  if (b.rows() != n || c.cols() != n || n_cov.rows() != b.cols() || n_cov.cols() != b.cols() ||
      r_meas.rows() != c.rows() || r_meas.cols() != c.rows()) {
    throw Error(ErrorKind::InvalidParam, "filter Riccati dimensions are inconsistent");
  }
  for (const Mat* m : {&a, &b, &c, &n_cov, &r_meas}) require_finite(*m, "filter Riccati input");
  require_symmetric(n_cov, "N");
  require_symmetric(r_meas, "R");
  if (!is_positive_definite(n_cov) || !is_positive_definite(r_meas)) {
    throw Error(ErrorKind::InvalidParam, "N and R must be positive definite");
  }

  const Mat rinv = r_meas.inverse();
  const QuadraticAre eq{a.transpose(), -c.transpose() * rinv * c, b * n_cov * b.transpose(), true};

  Mat p;
  if (!hamiltonian_seed(eq, p)) {
    throw Error(ErrorKind::NoStabilizingSolution, "Hamiltonian has no stable n-dimensional invariant subspace");
  }
  const double tol = 1e-10 * (1.0 + a.norm() + p.squaredNorm());
  p = newton_polish(eq, p, tol);

  if (!branch_ok(eq, p)) {
    throw Error(ErrorKind::NoStabilizingSolution, "A - P C' R^-1 C is not Hurwitz");
  }
  const double res = filter_are_residual(a, b, c, n_cov, r_meas, p).norm();
  if (!(res <= 1e-10 * (1.0 + a.norm() + p.squaredNorm()))) {
    throw Error(ErrorKind::IllConditioned, "filter Riccati residual " + std::to_string(res));
  }
  return p;
}

Mat solve_robust_are(const Mat& a, const Mat& w, const Mat& m, Branch branch) {
  require_square(a, "A");
  const Eigen::Index n = a.rows();
  if (n > kMaxStateDim) throw Error(ErrorKind::InvalidParam, "state dimension above 8");
  if (w.rows() != n || w.cols() != n || m.rows() != n || m.cols() != n) {
    throw Error(ErrorKind::InvalidParam, "robust Riccati dimensions are inconsistent");
  }
  for (const Mat* x : {&a, &w, &m}) require_finite(*x, "robust Riccati input");
  require_symmetric(w, "W");
  require_symmetric(m, "M");

  const QuadraticAre eq = branch == Branch::forward ? QuadraticAre{a, w, m, false} : QuadraticAre{a, -w, -m, true};

  Mat x;
  if (!hamiltonian_seed(eq, x)) {
    throw Error(ErrorKind::NoAdmissibleSolution, "no invariant subspace for the requested branch");
  }
  const double tol = 1e-10 * (1.0 + a.norm() + x.squaredNorm());
  x = newton_polish(eq, x, tol);

  if (!branch_ok(eq, x)) {
    throw Error(ErrorKind::NoAdmissibleSolution, "branch criterion violated");
  }
  const double res = robust_are_residual(a, w, m, branch, x).norm();
  if (!(res <= 1e-10 * (1.0 + a.norm() + x.squaredNorm()))) {
    throw Error(ErrorKind::NoAdmissibleSolution, "robust Riccati residual " + std::to_string(res));
  }
  if (!is_positive_definite(x)) {
    throw Error(ErrorKind::NoAdmissibleSolution, "Riccati solution is not positive definite");
  }
  return x;
}

Mat solve_lyapunov(const Mat& a, const Mat& q) {
  require_square(a, "A");
  if (q.rows() != a.rows() || q.cols() != a.cols()) {
    throw Error(ErrorKind::InvalidParam, "Lyapunov dimensions are inconsistent");
  }
  require_finite(a, "A");
  require_finite(q, "Q");
  require_symmetric(q, "Q");
  if (!is_hurwitz(a)) throw Error(ErrorKind::NotHurwitz, "Lyapunov matrix has a non-negative eigenvalue");

  Mat cs;
  if (!detail::lyapunov_elimination(a, q, cs)) {
    throw Error(ErrorKind::IllConditioned, "Lyapunov elimination system is singular");
  }
  const double tol = 1e-11 * (1.0 + a.norm() * cs.norm());
  Mat res = a * cs + cs * a.transpose() + q;
  if (res.norm() > tol) {
    Mat corr;
    if (detail::lyapunov_elimination(a, res, corr)) cs = symmetrize(cs + corr);
    res = a * cs + cs * a.transpose() + q;
  }
  if (!(res.norm() <= tol)) {
    throw Error(ErrorKind::IllConditioned, "Lyapunov residual " + std::to_string(res.norm()));
  }
  return cs;
}

}  // namespace rpsmooth
