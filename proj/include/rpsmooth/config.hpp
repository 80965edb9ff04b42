#pragma once

#include "rpsmooth/analysis.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace rpsmooth {

/// Run configuration shared by the config file and the command line. Unset
/// fields fall back to the per-experiment defaults.
///
/// File format: one `key = value` per line, `#` starts a comment, blank lines
/// ignored. Keys are the long CLI flag names (out, mu, grid, combine, loss,
/// seed, threads, backward_plant) plus lambda, kappa, zeta, omega_r, alpha_sq, r_pure, l_sq,
/// r_m, r_p, grid_start, grid_stop, delta_grid, dt, T. `loss` and `l_sq` are
/// synonyms. Unknown or repeated keys are errors.
struct RunConfig {
  std::optional<std::string> out;
  std::optional<double> mu;
  std::optional<int> grid;
  std::optional<CombineMode> combine;
  std::optional<BackwardPlant> backward_plant;
  std::optional<double> l_sq;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  std::optional<double> lambda;
  std::optional<double> kappa;
  std::optional<double> zeta;
  std::optional<double> omega_r;
  std::optional<double> alpha_sq;
  std::optional<double> r_pure;
  std::optional<double> r_m;
  std::optional<double> r_p;

  std::optional<double> grid_start;
  std::optional<double> grid_stop;
  std::optional<int> delta_grid;
  std::optional<double> dt;
  std::optional<double> T;
};

/// Throws Error(ConfigError) with the offending line number.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Sets one key from its textual value (shared by the file parser and tests).
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Fields set in `over` replace those in `base`.
RunConfig merge_config(const RunConfig& base, const RunConfig& over);

CombineMode parse_combine_mode(const std::string& s);
BackwardPlant parse_backward_plant(const std::string& s);

}  // namespace rpsmooth
