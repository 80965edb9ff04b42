// rpsmooth: runs one sweep and writes its CSV.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure at one or
// more grid points (the CSV is still written).

#include "rpsmooth/config.hpp"
#include "rpsmooth/error.hpp"
#include "rpsmooth/experiments.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <iostream>
#include <string>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace rpsmooth;

  CLI::App app{"Robust phase smoothing sweeps"};
  std::string experiment;
  std::string config_path;
  RunConfig flags;
  std::string out, combine, backward_plant;
  double mu = 0.0, loss = 0.0;
  int grid = 0, threads = 0;
  std::uint64_t seed = 0;

  std::string ids;
  for (const auto& id : experiment_ids()) ids += (ids.empty() ? "" : ", ") + id;
  app.add_option("experiment", experiment, "Experiment id: " + ids)->required();
  app.add_option("--config", config_path, "Key = value configuration file");
  auto* o_out = app.add_option("--out", out, "Output CSV path (default <experiment>.csv)");
  auto* o_mu = app.add_option("--mu", mu, "Uncertainty bound");
  auto* o_grid = app.add_option("--grid", grid, "Number of sweep points");
  auto* o_combine = app.add_option("--combine", combine, "matrix-first or scalar-first");
  auto* o_backward = app.add_option("--backward-plant", backward_plant, "same-process or time-reversed");
  auto* o_loss = app.add_option("--loss", loss, "Squeezing loss l_sq");
  auto* o_seed = app.add_option("--seed", seed, "Monte Carlo seed");
  auto* o_threads = app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  SweepSpec spec;
  try {
    if (*o_out) flags.out = out;
    if (*o_mu) flags.mu = mu;
    if (*o_grid) flags.grid = grid;
    if (*o_combine) flags.combine = parse_combine_mode(combine);
    if (*o_backward) flags.backward_plant = parse_backward_plant(backward_plant);
    if (*o_loss) flags.l_sq = loss;
    if (*o_seed) flags.seed = seed;
    if (*o_threads) flags.threads = threads;

    const ExperimentId id = parse_experiment_id(experiment);
    RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
    cfg = merge_config(cfg, flags);
    if (cfg.threads && *cfg.threads < 0) throw Error(ErrorKind::ConfigError, "threads must be non-negative");
    if (cfg.threads && *cfg.threads > 0) omp_set_num_threads(*cfg.threads);
    spec = make_sweep_spec(id, cfg);
  } catch (const Error& e) {
    std::cerr << "rpsmooth: " << e.what() << '\n';
    return kExitConfig;
  }

  Table table;
  try {
    table = run_sweep(spec, Exec::parallel);
    write_csv(table, spec.out_path);
  } catch (const Error& e) {
    std::cerr << "rpsmooth: " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitNumerical;
  }

  std::cout << "wrote " << table.rows.size() << " rows to " << spec.out_path << '\n';
  for (const auto& [key, value] : table.summary) std::cout << key << ": " << value << '\n';

  int failed = 0;
  for (std::size_t i = 0; i < table.errors.size(); ++i) {
    if (table.errors[i].empty()) continue;
    ++failed;
    std::cerr << "row " << i << ": " << table.errors[i] << '\n';
  }
  if (auto it = std::find(table.columns.begin(), table.columns.end(), "non_unimodal"); it != table.columns.end()) {
    const auto col = static_cast<std::size_t>(it - table.columns.begin());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (table.rows[i][col] == 1.0) std::cerr << "row " << i << ": NonUnimodal squeezing objective, grid fallback used\n";
    }
  }
  if (failed > 0) {
    std::cerr << "rpsmooth: " << failed << " grid point(s) failed\n";
    return kExitNumerical;
  }
  return 0;
}
