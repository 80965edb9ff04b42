#include "rpsmooth/montecarlo.hpp"

#include "rpsmooth/error.hpp"
#include "rpsmooth/rng.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace rpsmooth {

namespace {

using SVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxStateDim, 1>;
using SMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxStateDim, kMaxStateDim>;

constexpr double kUnstableNorm = 1e6;

/// Discrete update xhat+ = E xhat + Gam theta_bar of xhat' = F xhat + G theta
/// with theta held at its step mean.
struct DiscreteFilter {
  SMat E;
  SVec Gam;
};

DiscreteFilter discretize_filter(const FilterDesign& f, double h) {
  const Eigen::Index n = f.F.rows();
  Mat aug = Mat::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = f.F * h;
  aug.topRightCorner(n, 1) = f.G * h;
  const Mat ex = aug.exp();
  return DiscreteFilter{ex.topLeftCorner(n, n), ex.topRightCorner(n, 1)};
}

double slowest_time_constant(const std::vector<const Mat*>& dyn) {
  double slowest_rate = std::numeric_limits<double>::infinity();
  for (const Mat* a : dyn) {
    const double rate = -max_real_eigenvalue(*a);
    if (!(rate > 0.0)) throw Error(ErrorKind::Unstable, "simulated dynamics are not asymptotically stable");
    slowest_rate = std::min(slowest_rate, rate);
  }
  return 1.0 / slowest_rate;
}

class TraceWriter {
 public:
  TraceWriter(const std::string& path, const SimConfig& cfg) : out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorKind::ConfigError, "cannot open trace file " + path);
    out_.write("RPSTRACE", 8);
    put_u32(1);
    put_u32(4);
    put_f64(cfg.dt);
    put_f64(cfg.T);
    put_u64(cfg.seed);
    put_u64(static_cast<std::uint64_t>(cfg.trace_stride));
  }

  void record(double t, double phi, double phi_hat, double theta) {
    put_f64(t);
    put_f64(phi);
    put_f64(phi_hat);
    put_f64(theta);
  }

  void finish() {
    out_.flush();
    if (!out_) throw Error(ErrorKind::ConfigError, "writing the trace file failed");
  }

 private:
  void put_bytes(std::uint64_t v, int count) {
    char buf[8];
    for (int i = 0; i < count; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
    out_.write(buf, count);
  }
  void put_u32(std::uint32_t v) { put_bytes(v, 4); }
  void put_u64(std::uint64_t v) { put_bytes(v, 8); }
  void put_f64(double v) { put_bytes(std::bit_cast<std::uint64_t>(v), 8); }

  std::ofstream out_;
};

struct BatchStats {
  explicit BatchStats(int batches) : sums(static_cast<std::size_t>(batches), {0.0, 0.0, 0.0, 0.0}), counts(sums.size(), 0) {}

  void add(std::size_t batch, double e1, double e2, double e) {
    auto& s = sums[batch];
    s[0] += e1 * e1;
    s[1] += e2 * e2;
    s[2] += e1 * e2;
    s[3] += e * e;
    ++counts[batch];
  }

  // Pooled mean and batch-means standard error of moment j.
  std::pair<double, double> moment(int j) const {
    double total = 0.0;
    long long count = 0;
    for (std::size_t b = 0; b < sums.size(); ++b) {
      total += sums[b][static_cast<std::size_t>(j)];
      count += counts[b];
    }
    const double mean = total / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t b = 0; b < sums.size(); ++b) {
      const double d = sums[b][static_cast<std::size_t>(j)] / static_cast<double>(counts[b]) - mean;
      ss += d * d;
    }
    const double nb = static_cast<double>(sums.size());
    return {mean, std::sqrt(ss / (nb - 1.0) / nb)};
  }

  std::vector<std::array<double, 4>> sums;
  std::vector<long long> counts;
};

}  // namespace

SimResult simulate_tracking(const ProcessModel& model, const UncertaintySpec& unc, const SqueezingConfig& sq,
                            const SimConfig& cfg, const AnalysisOptions& opts) {
  AnalysisOptions o = opts;
  o.combine = cfg.combine;
  UncertaintySpec u = unc;
  if (cfg.mu != unc.mu) u = make_uncertainty(model, cfg.mu);
  const ErrorReport rep = evaluate_error(model, u, sq, cfg.kind, cfg.delta, o);
  return simulate_tracking(model, u, sq, cfg, rep);
}

SimResult simulate_tracking(const ProcessModel& model, const UncertaintySpec& unc, const SqueezingConfig& sq,
                            const SimConfig& cfg, const ErrorReport& analytic) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(ErrorKind::InvalidParam, "dt must be positive");
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw Error(ErrorKind::InvalidParam, "T must be positive");
  if (cfg.batches < 2) throw Error(ErrorKind::InvalidParam, "at least two batches are required");
  if (cfg.noise_substeps < 1) throw Error(ErrorKind::InvalidParam, "noise_substeps must be at least 1");
  if (cfg.trace_stride < 1) throw Error(ErrorKind::InvalidParam, "trace_stride must be at least 1");
  if (!(cfg.noise_scale >= 0.0)) throw Error(ErrorKind::InvalidParam, "noise_scale must be non-negative");
  if (model.n > kMaxStateDim) throw Error(ErrorKind::InvalidParam, "state dimension exceeds the supported maximum");

  const Eigen::Index n = model.n;
  const double h = cfg.dt;
  const Mat a_true = apply_uncertainty(model, unc, cfg.delta);
  const Mat c = measurement_row(sq.alpha_sq, analytic.R_sq_converged, n);

  FilterPair filters;
  SmootherDesign smoother;
  if (cfg.kind == EstimatorKind::optimal) {
    filters = design_optimal_filters(model, c);
  } else {
    RobustDesign r = design_robust_filters(model, unc, c);
    filters = FilterPair{std::move(r.fwd), std::move(r.bwd)};
    smoother = std::move(r.smoother);
  }
  const FilterDesign& causal = cfg.swap_roles ? filters.bwd : filters.fwd;
  const FilterDesign& reversed = cfg.swap_roles ? filters.fwd : filters.bwd;

  const double tau = slowest_time_constant({&a_true, &filters.fwd.F, &filters.bwd.F});
  const double burn_in = cfg.burn_in < 0.0 ? 20.0 * tau : cfg.burn_in;
  if (cfg.T < 100.0 * tau) throw Error(ErrorKind::InvalidParam, "T must cover at least 100 time constants");
  if (burn_in < 10.0 * tau) throw Error(ErrorKind::InvalidParam, "burn_in must cover at least 10 time constants");

  const long long steps = std::llround(cfg.T / h);
  const long long nb = static_cast<long long>(std::ceil(burn_in / h));
  const long long first = nb;
  const long long last = steps - nb;  // exclusive; the backward filter needs its own burn-in
  if (last - first < cfg.batches) throw Error(ErrorKind::InvalidParam, "horizon too short for the burn-in and batch count");

  // Combination applied to the stored estimates.
  const bool vector_combine = cfg.kind == EstimatorKind::robust && cfg.combine == CombineMode::matrix_first && n > 1;
  SVec w_causal = SVec::Zero(n);
  SVec w_reversed = SVec::Zero(n);
  if (vector_combine) {
    w_causal = (cfg.swap_roles ? smoother.k2 : smoother.k1).row(0).transpose();
    w_reversed = (cfg.swap_roles ? smoother.k1 : smoother.k2).row(0).transpose();
  } else {
    w_causal(0) = cfg.swap_roles ? analytic.k2 : analytic.k1;
    w_reversed(0) = cfg.swap_roles ? analytic.k1 : analytic.k2;
  }

  // Plant: exponential midpoint scheme.
  const SMat phi_step = (a_true * h).exp();
  const Mat half = (a_true * (0.5 * h)).exp();
  const Eigen::Index nw = model.B.cols();
  const SMat b_half = half * model.B;
  const SVec c_row = c.row(0).transpose();

  const DiscreteFilter fwd_d = discretize_filter(causal, h);
  const DiscreteFilter bwd_d = discretize_filter(reversed, h);

  NormalStream rng(cfg.seed, 0);

  // Stationary initial plant state.
  SVec x(n);
  {
    const Mat sigma0 = solve_lyapunov(a_true, model.B * model.B.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma0);
    const Mat root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Vec z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.next();
    x = root * z;
  }
  SVec xf = SVec::Zero(n);

  std::optional<TraceWriter> trace;
  if (cfg.trace_path) trace.emplace(*cfg.trace_path, cfg);

  const double sub_scale = std::sqrt(h / cfg.noise_substeps) * cfg.noise_scale;
  SVec dw(nw);
  SVec x_next(n);

  // Rolling record of (phi_k, xhat_f,k, theta_k), indices [base, generated).
  std::vector<double> rec_phi;
  std::vector<double> rec_theta;
  std::vector<double> rec_xf;
  long long base = 0;
  long long generated = 0;

  auto generate_until = [&](long long end) {
    for (long long k = generated; k < end; ++k) {
      rec_phi.push_back(x(0));
      for (Eigen::Index i = 0; i < n; ++i) rec_xf.push_back(xf(i));

      dw.setZero();
      double dv = 0.0;
      for (int s = 0; s < cfg.noise_substeps; ++s) {
        for (Eigen::Index j = 0; j < nw; ++j) dw(j) += rng.next();
        dv += rng.next();
      }
      dw *= sub_scale;
      dv *= sub_scale;

      x_next.noalias() = phi_step * x;
      x_next.noalias() += b_half * dw;
      const double theta = 0.5 * c_row.dot(x + x_next) + dv / h;
      rec_theta.push_back(theta);

      if (trace && k % cfg.trace_stride == 0) trace->record(static_cast<double>(k) * h, x(0), xf(0), theta);

      SVec xf_next = fwd_d.E * xf;
      xf_next.noalias() += fwd_d.Gam * theta;
      xf = xf_next;
      x = x_next;
      if (!(x.squaredNorm() < kUnstableNorm * kUnstableNorm) ||
          !(xf.squaredNorm() < kUnstableNorm * kUnstableNorm)) {
        throw Error(ErrorKind::Unstable, "state norm exceeded 1e6 at t = " + std::to_string(k * h));
      }
    }
    generated = std::max(generated, end);
  };

  BatchStats stats(cfg.batches);
  const long long span = last - first;
  const long long chunk = std::max<long long>(1 << 18, nb);

  SVec xb(n);
  SVec xb_prev(n);
  for (long long s = first; s < last; s += chunk) {
    const long long e = std::min(s + chunk, last);
    const long long stop = e + nb;  // backward filter starts here from rest
    generate_until(stop);

    xb.setZero();
    for (long long k = stop - 1; k >= s; --k) {
      const std::size_t i = static_cast<std::size_t>(k - base);
      xb_prev.noalias() = bwd_d.E * xb;
      xb_prev.noalias() += bwd_d.Gam * rec_theta[i];
      xb = xb_prev;
      if (!(xb.squaredNorm() < kUnstableNorm * kUnstableNorm)) {
        throw Error(ErrorKind::Unstable, "backward estimate norm exceeded 1e6");
      }
      if (k >= e) continue;
      const double phi = rec_phi[i];
      const Eigen::Map<const Eigen::VectorXd> xf_k(rec_xf.data() + i * static_cast<std::size_t>(n), n);
      const double e1 = phi - xf_k(0);
      const double e2 = phi - xb(0);
      const double comb = w_causal.dot(xf_k) + w_reversed.dot(xb);
      const double e_s = phi - comb;
      const auto batch = static_cast<std::size_t>((k - first) * cfg.batches / span);
      stats.add(batch, e1, e2, e_s);
    }

    // Keep only what later chunks still need.
    const std::size_t drop = static_cast<std::size_t>(e - base);
    rec_phi.erase(rec_phi.begin(), rec_phi.begin() + static_cast<std::ptrdiff_t>(drop));
    rec_theta.erase(rec_theta.begin(), rec_theta.begin() + static_cast<std::ptrdiff_t>(drop));
    rec_xf.erase(rec_xf.begin(), rec_xf.begin() + static_cast<std::ptrdiff_t>(drop * static_cast<std::size_t>(n)));
    base = e;
  }
  if (trace) {
    generate_until(steps);
    trace->finish();
  }

  SimResult out;
  std::tie(out.emp_sigma_f_sq, out.stderr_f) = stats.moment(0);
  std::tie(out.emp_sigma_b_sq, out.stderr_b) = stats.moment(1);
  std::tie(out.emp_sigma_fb_sq, out.stderr_fb) = stats.moment(2);
  std::tie(out.emp_sigma_sq, out.stderr_s) = stats.moment(3);
  out.samples = span;
  out.burn_in = burn_in;
  return out;
}

}  // namespace rpsmooth
