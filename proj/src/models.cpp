#include "rpsmooth/models.hpp"

#include "rpsmooth/error.hpp"

#include <cmath>
#include <string>

namespace rpsmooth {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidParam, std::string(name) + " must be finite and positive");
  }
}

}  // namespace

ProcessModel build_ou(double lambda, double kappa) {
  require_positive(lambda, "lambda");
  require_positive(kappa, "kappa");
  ProcessModel m;
  m.kind = NoiseKind::ou;
  m.n = 1;
  m.A = make_mat(1, 1, {-lambda});
  m.B = make_mat(1, 1, {std::sqrt(kappa)});
  m.lambda = lambda;
  m.kappa = kappa;
  return m;
}

ProcessModel build_resonant(double kappa, double zeta, double omega_r) {
  require_positive(kappa, "kappa");
  require_positive(zeta, "zeta");
  require_positive(omega_r, "omega_r");
  ProcessModel m;
  m.kind = NoiseKind::resonant;
  m.n = 2;
  m.A = make_mat(2, 2, {0.0, 1.0, -omega_r * omega_r, -2.0 * zeta * omega_r});
  m.B = make_mat(2, 1, {0.0, kappa});
  m.kappa = kappa;
  m.zeta = zeta;
  m.omega_r = omega_r;
  return m;
}

UncertaintySpec make_uncertainty(const ProcessModel& model, double mu) {
  if (!(mu >= 0.0 && mu < 1.0)) throw Error(ErrorKind::InvalidParam, "mu must lie in [0, 1)");
  UncertaintySpec u;
  u.mu = mu;
  u.B1 = model.B;
  if (model.kind == NoiseKind::ou) {
    u.K = make_mat(1, 1, {mu * model.lambda / std::sqrt(model.kappa)});
  } else {
    u.K = make_mat(1, 2, {-mu * model.omega_r * model.omega_r / model.kappa, 0.0});
  }
  return u;
}

Mat apply_uncertainty(const ProcessModel& model, const UncertaintySpec& unc, double delta) {
  if (!(std::abs(delta) <= 1.0)) {
    throw Error(ErrorKind::DeltaOutOfRange, "|delta| must not exceed 1, got " + std::to_string(delta));
  }
  return model.A + unc.B1 * delta * unc.K;
}

EffectiveSqueezing effective_squeezing(double r_pure, double l_sq) {
  if (!(r_pure >= 0.0) || !(l_sq >= 0.0 && l_sq < 1.0)) {
    throw Error(ErrorKind::InvalidParam, "need r_pure >= 0 and 0 <= l_sq < 1");
  }
  EffectiveSqueezing out;
  out.r_m = -0.5 * std::log((1.0 - l_sq) * std::exp(-2.0 * r_pure) + l_sq);
  out.r_p = 0.5 * std::log((1.0 - l_sq) * std::exp(2.0 * r_pure) + l_sq);
  return out;
}

SqueezingConfig SqueezingConfig::from_pure(double alpha_sq, double r_pure, double l_sq) {
  require_positive(alpha_sq, "alpha_sq");
  const EffectiveSqueezing eff = effective_squeezing(r_pure, l_sq);
  return SqueezingConfig{alpha_sq, r_pure, l_sq, eff.r_m, eff.r_p};
}

SqueezingConfig SqueezingConfig::from_pair(double alpha_sq, double r_m, double r_p) {
  require_positive(alpha_sq, "alpha_sq");
  if (!(r_m >= 0.0) || !(r_p >= r_m)) throw Error(ErrorKind::InvalidParam, "need r_p >= r_m >= 0");
  // No pure level behind a directly given pair.
  return SqueezingConfig{alpha_sq, std::nan(""), 0.0, r_m, r_p};
}

double compute_R_sq(double sigma_f_sq, double r_m, double r_p) {
  if (!(sigma_f_sq >= 0.0 && sigma_f_sq <= 1.0)) {
    throw Error(ErrorKind::SigmaOutOfRange, "sigma_f^2 = " + std::to_string(sigma_f_sq) + " outside [0, 1]");
  }
  return sigma_f_sq * std::exp(2.0 * r_p) + (1.0 - sigma_f_sq) * std::exp(-2.0 * r_m);
}

Mat measurement_row(double alpha_sq, double R_sq, Eigen::Index n) {
  require_positive(alpha_sq, "alpha_sq");
  require_positive(R_sq, "R_sq");
  if (n < 1 || n > kMaxStateDim) throw Error(ErrorKind::InvalidParam, "state dimension out of range");
  Mat c = Mat::Zero(1, n);
  c(0, 0) = 2.0 * std::sqrt(alpha_sq) / std::sqrt(R_sq);
  return c;
}

double squeezing_db(double r_m) { return 10.0 * std::log10(std::exp(-2.0 * r_m)); }

double r_from_db(double db) { return -db * std::log(10.0) / 20.0; }

}  // namespace rpsmooth
