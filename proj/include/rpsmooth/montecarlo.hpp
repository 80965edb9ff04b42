#pragma once

#include "rpsmooth/analysis.hpp"
#include "rpsmooth/estimators.hpp"
#include "rpsmooth/models.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace rpsmooth {

struct SimConfig {
  double dt = 1e-7;        // s
  double T = 1.0;          // s
  double burn_in = -1.0;   // s; negative selects 20 x the slowest time constant
  std::uint64_t seed = 1;
  double delta = 0.0;
  double mu = 0.0;
  EstimatorKind kind = EstimatorKind::optimal;
  CombineMode combine = CombineMode::scalar_first;

  /// Multiplies both noise inputs; 0 gives the deterministic decay of the
  /// initial state.
  double noise_scale = 1.0;
  /// Brownian increments of one step are built from this many unit normals,
  /// so a run at dt with m substeps and a run at dt/m share one noise path.
  int noise_substeps = 1;
  /// Runs the backward design causally and the forward design over the
  /// reversed record.
  bool swap_roles = false;
  int batches = 100;

  std::optional<std::string> trace_path;
  int trace_stride = 1;
};

struct SimResult {
  double emp_sigma_f_sq = 0.0;
  double emp_sigma_b_sq = 0.0;
  double emp_sigma_fb_sq = 0.0;
  double emp_sigma_sq = 0.0;
  double stderr_f = 0.0;
  double stderr_b = 0.0;
  double stderr_fb = 0.0;
  double stderr_s = 0.0;
  long long samples = 0;
  double burn_in = 0.0;
};

/// Time-domain simulation of the linearised tracking loop against the plant
/// perturbed by cfg.delta. Filters are designed at `analytic.R_sq_converged`
/// and the optimal-estimator combination uses the weights in `analytic`.
///
/// Plant: exponential midpoint scheme x+ = e^{Ah} x + e^{Ah/2} B dW.
/// Measurement increment over a step: C (x + x+)/2 h + dV.
/// Filters: exact exponential update with the step's mean theta held constant.
/// The backward filter runs over the reversed record in chunks with a
/// burn-in overlap, so memory stays bounded.
SimResult simulate_tracking(const ProcessModel& model, const UncertaintySpec& unc, const SqueezingConfig& sq,
                            const SimConfig& cfg, const ErrorReport& analytic);

/// Convenience overload: evaluates the analytic pipeline for the same point
/// first.
SimResult simulate_tracking(const ProcessModel& model, const UncertaintySpec& unc, const SqueezingConfig& sq,
                            const SimConfig& cfg, const AnalysisOptions& opts = {});

/// Header of the raw trace file (all fields little-endian):
///   char[8] "RPSTRACE", u32 version (=1), u32 columns (=4),
///   f64 dt, f64 T, u64 seed, u64 stride,
/// followed by records of 4 f64: t, phi, phi_hat_f, theta.
struct TraceHeader {
  std::uint32_t version = 1;
  std::uint32_t columns = 4;
  double dt = 0.0;
  double T = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stride = 1;
};

inline constexpr std::size_t kTraceHeaderBytes = 8 + 4 + 4 + 8 + 8 + 8 + 8;

}  // namespace rpsmooth
