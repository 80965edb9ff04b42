#pragma once

#include "rpsmooth/matops.hpp"

namespace rpsmooth {

enum class NoiseKind { ou, resonant };

/// Phase-noise process  x' = A x + B v  with unit-intensity white v.
/// The phase is the first state component.
struct ProcessModel {
  Mat A;
  Mat B;
  Eigen::Index n = 0;
  NoiseKind kind = NoiseKind::ou;
  // Defining scalars; unused ones stay zero.
  double lambda = 0.0;
  double kappa = 0.0;
  double zeta = 0.0;
  double omega_r = 0.0;
};

/// Ornstein-Uhlenbeck phase: A = [-lambda], B = [sqrt(kappa)].
ProcessModel build_ou(double lambda, double kappa);

/// Second-order resonant (PZT) phase with transfer function
/// kappa / (s^2 + 2 zeta omega_r s + omega_r^2).
ProcessModel build_resonant(double kappa, double zeta, double omega_r);

/// Rank-one uncertainty A -> A + B1 * delta * K with |delta| <= 1.
struct UncertaintySpec {
  double mu = 0.0;
  Mat K;   // 1 x n
  Mat B1;  // n x 1, equal to the model's B
};

/// OU: K = [mu lambda / sqrt(kappa)]. Resonant: K = [-mu omega_r^2 / kappa, 0]
/// (the damping entry carries no uncertainty).
UncertaintySpec make_uncertainty(const ProcessModel& model, double mu);

/// A + B1 * delta * K.
Mat apply_uncertainty(const ProcessModel& model, const UncertaintySpec& unc, double delta);

struct EffectiveSqueezing {
  double r_m = 0.0;
  double r_p = 0.0;
};

/// Beam-splitter loss mixing the pure squeezed state with vacuum:
///   exp(-2 r_m) = (1 - l) exp(-2 r) + l,   exp(2 r_p) = (1 - l) exp(2 r) + l.
EffectiveSqueezing effective_squeezing(double r_pure, double l_sq);

/// Photon flux plus the effective squeezing pair. Either built from a pure
/// squeezing level and a loss, or with (r_m, r_p) given directly.
struct SqueezingConfig {
  double alpha_sq = 0.0;
  double r_pure = 0.0;
  double l_sq = 0.0;
  double r_m = 0.0;
  double r_p = 0.0;

  static SqueezingConfig from_pure(double alpha_sq, double r_pure, double l_sq);
  static SqueezingConfig from_pair(double alpha_sq, double r_m, double r_p);
};

/// Effective measurement noise power sigma_f^2 e^{2 r_p} + (1 - sigma_f^2) e^{-2 r_m}.
double compute_R_sq(double sigma_f_sq, double r_m, double r_p);

/// Scaled homodyne measurement row [2 |alpha| / sqrt(R_sq), 0, ...].
Mat measurement_row(double alpha_sq, double R_sq, Eigen::Index n);

/// Measured squeezing level in dB relative to shot noise, 10 log10(e^{-2 r_m}).
double squeezing_db(double r_m);

/// Pure squeezing parameter for a level given in dB (the inverse of squeezing_db
/// applied to a lossless beam).
double r_from_db(double db);

}  // namespace rpsmooth
