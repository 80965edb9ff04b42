#pragma once

#include "rpsmooth/analysis.hpp"
#include "rpsmooth/config.hpp"
#include "rpsmooth/models.hpp"
#include "rpsmooth/parallel.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace rpsmooth {

enum class ExperimentId { ou_delta, ou_mu, res_delta, res_mu, res_zeta, res_squeeze, res_flux, mc_validate };

ExperimentId parse_experiment_id(const std::string& s);  // ConfigError on unknown ids
std::string to_string(ExperimentId id);
std::vector<std::string> experiment_ids();

enum class SqueezeObjective {
  nominal_error,  // optimal-estimator error of the exact (delta = 0) model
  worst_robust,   // worst-case robust error over the delta grid
};

/// Fully resolved description of one sweep.
struct SweepSpec {
  ExperimentId id = ExperimentId::ou_delta;
  double start = 0.0;
  double stop = 0.0;
  int count = 3;
  bool log_spaced = false;

  // Fixed model parameters.
  double lambda = 5.9e4;
  double kappa = 1.9e4;
  double zeta = 0.1;
  double omega_r = 6.283e3;
  double alpha_sq = 1e6;
  double mu = 0.8;

  // Squeezing: either a fixed (r_m, r_p) pair, a fixed pure level with loss,
  // or optimized per grid point.
  bool squeeze_pair = true;
  double r_m = 0.36;
  double r_p = 0.59;
  double r_pure = 0.0;
  std::vector<double> losses{0.0};  // res-squeeze runs one block per loss
  bool optimize = false;
  SqueezeObjective objective = SqueezeObjective::nominal_error;

  int delta_grid = 201;
  AnalysisOptions analysis;

  // mc-validate only.
  std::uint64_t seed = 1;
  double dt = 1e-7;
  double T = 1.0;

  std::string out_path;
};

/// Defaults of `id` overridden by `cfg`; throws ConfigError on invalid or
/// contradictory settings.
SweepSpec make_sweep_spec(ExperimentId id, const RunConfig& cfg);

/// Sweep output: numeric columns plus a trailing free-text `error` column.
/// `summary` holds human-readable key/value lines (e.g. squeezing optima).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> errors;
  std::vector<std::pair<std::string, std::string>> summary;

  std::size_t column(const std::string& name) const;  // InvalidParam if absent
  double at(std::size_t row, const std::string& name) const { return rows[row][column(name)]; }
  bool has_errors() const;
};

Table run_sweep(const SweepSpec& spec, Exec exec = Exec::parallel);

/// Header row, 17 significant digits, LF line endings. The error column is
/// quoted when it contains separators.
void write_csv(const Table& t, std::ostream& out);
void write_csv(const Table& t, const std::string& path);

struct SqueezeOptimum {
  double r_star = 0.0;
  double value = 0.0;
  bool non_unimodal = false;  // grid fallback was used
  int evaluations = 0;
};

/// Minimises `fn` over [lo, hi] by golden-section search to |dr| < tol.
/// Non-finite values count as +inf. If the evaluated points show more than one
/// descent region, or any non-finite value, falls back to a 61-point grid
/// followed by golden-section refinement around the best grid point.
/// Throws NoAdmissibleSolution if no point is finite.
SqueezeOptimum minimize_scalar(const std::function<double(double)>& fn, double lo, double hi, double tol = 1e-3);

/// Objective value for a pure squeezing level (failures map to +inf).
double squeeze_objective(SqueezeObjective objective, const ProcessModel& model, const UncertaintySpec& unc,
                         double alpha_sq, double r_pure, double l_sq, int delta_grid, const AnalysisOptions& opts);

/// Optimal pure squeezing level on [0, 3].
SqueezeOptimum optimize_squeezing(SqueezeObjective objective, const ProcessModel& model, const UncertaintySpec& unc,
                                  double alpha_sq, double l_sq, int delta_grid = 201,
                                  const AnalysisOptions& opts = {});

}  // namespace rpsmooth
