// Serial reference vs OpenMP grid kernel on the worst-case error sweep.

#include "rpsmooth/analysis.hpp"
#include "rpsmooth/parallel.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace rpsmooth;

namespace {

struct Setup {
  ProcessModel model;
  UncertaintySpec unc;
  SqueezingConfig sq;
  std::vector<double> deltas;
};

Setup make_setup(bool resonant, int points) {
  Setup s;
  s.model = resonant ? build_resonant(9e4, 0.1, 6.283e3) : build_ou(5.9e4, 1.9e4);
  s.unc = make_uncertainty(s.model, 0.8);
  s.sq = resonant ? SqueezingConfig::from_pair(25e4, 0.48, 1.11) : SqueezingConfig::from_pair(1e6, 0.36, 0.59);
  s.deltas = linear_grid(-1.0, 1.0, points);
  return s;
}

template <Exec exec>
void worst_case_sweep(benchmark::State& state) {
  const Setup s = make_setup(state.range(0) == 1, static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto eval = [&](double d) { return evaluate_error(s.model, s.unc, s.sq, EstimatorKind::robust, d).sigma_sq; };
    auto out = exec == Exec::serial ? grid_map_serial<double>(s.deltas, eval) : grid_map_omp<double>(s.deltas, eval);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

}  // namespace

// Args: {model (0 = OU, 1 = resonant), delta grid points}
BENCHMARK(worst_case_sweep<Exec::serial>)->Args({0, 201})->Args({1, 201})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(worst_case_sweep<Exec::parallel>)->Args({0, 201})->Args({1, 201})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
