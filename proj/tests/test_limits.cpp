#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rpsmooth/limits.hpp"
#include "rpsmooth/parallel.hpp"

#include <cmath>

using namespace rpsmooth;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("coherent limit for the nominal OU plant is the smoother closed form at unit noise power") {
  const ProcessModel m = build_ou(5.9e4, 1.9e4);
  const UncertaintySpec u = make_uncertainty(m, 0.8);
  const double alpha_sq = 1e6;
  const double root = std::sqrt(m.lambda * m.lambda + 4.0 * m.kappa * alpha_sq);
  CHECK(rel(compute_csl(m, u, alpha_sq, 0.0), m.kappa / (2.0 * root)) < 1e-12);
  // Matched redesign at delta = 1 uses the perturbed decay rate.
  const double lam1 = 0.2 * m.lambda;
  const double root1 = std::sqrt(lam1 * lam1 + 4.0 * m.kappa * alpha_sq);
  CHECK(rel(compute_csl(m, u, alpha_sq, 1.0), m.kappa / (2.0 * root1)) < 1e-12);
}

TEST_CASE("coherent limit falls as the photon flux grows") {
  for (const ProcessModel& m : {build_ou(5.9e4, 1.9e4), build_resonant(9e4, 0.1, 6.283e3)}) {
    const UncertaintySpec u = make_uncertainty(m, 0.8);
    const double a = compute_csl(m, u, 1e5, -0.5);
    const double b = compute_csl(m, u, 1e6, -0.5);
    const double c = compute_csl(m, u, 1e7, -0.5);
    CHECK(a > b);
    CHECK(b > c);
  }
}

TEST_CASE("standard quantum limit against the scalar closed form and the ODE oracle") {
  const ProcessModel m = build_ou(5.9e4, 1.9e4);
  const UncertaintySpec u = make_uncertainty(m, 0.8);
  const double alpha_sq = 1e6;
  // -2 lambda P - 2 alpha^2 P^2 + kappa = 0.
  const double closed = (-m.lambda + std::sqrt(m.lambda * m.lambda + 2.0 * alpha_sq * m.kappa)) / (2.0 * alpha_sq);
  CHECK(rel(compute_sql(m, u, alpha_sq, 0.0), closed) < 1e-12);

  const ProcessModel r = build_resonant(9e4, 0.1, 6.283e3);
  const UncertaintySpec ur = make_uncertainty(r, 0.8);
  for (double delta : {-1.0, 0.0, 0.6}) {
    CAPTURE(delta);
    const Mat a = apply_uncertainty(r, ur, delta);
    Mat s = Mat::Zero(2, 2);
    s(0, 0) = -2.0 * 25e4;
    const Mat p = oracle::riccati_ode(a, s, r.B * r.B.transpose(), 2e-7, 0.5);
    CHECK(rel(compute_sql(r, ur, 25e4, delta), p(0, 0)) < 1e-8);
  }
}

TEST_CASE("standard quantum limit vanishes with the phase noise") {
  const double small = compute_sql(build_ou(5.9e4, 1e-6), make_uncertainty(build_ou(5.9e4, 1e-6), 0.0), 1e6, 0.0);
  CHECK(small < 1e-10);
  CHECK(small > 0.0);
  const double smaller =
      compute_sql(build_ou(5.9e4, 1e-9), make_uncertainty(build_ou(5.9e4, 1e-9), 0.0), 1e6, 0.0);
  CHECK(smaller < small);
}

TEST_CASE("standard quantum limit exceeds the coherent limit on the sweep grids") {
  struct Config {
    ProcessModel m;
    double alpha_sq;
  };
  for (const Config& cfg : {Config{build_ou(5.9e4, 1.9e4), 1e6}, Config{build_resonant(9e4, 0.1, 6.283e3), 25e4}}) {
    for (double mu : {0.0, 0.4, 0.8, 0.9}) {
      const UncertaintySpec u = make_uncertainty(cfg.m, mu);
      const std::vector<double> grid = linear_grid(-1.0, 1.0, 41);
      const BaselineCurve csl = baseline_curve(BaselineKind::csl, cfg.m, u, cfg.alpha_sq, grid);
      const BaselineCurve sql = baseline_curve(BaselineKind::sql, cfg.m, u, cfg.alpha_sq, grid);
      CHECK(csl.kind == BaselineKind::csl);
      CHECK(sql.values.size() == grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CAPTURE(mu);
        CAPTURE(grid[i]);
        CHECK(sql.values[i] > csl.values[i]);
      }
    }
  }
  for (double flux : log_grid(4e4, 1e6, 7)) {
    const ProcessModel m = build_resonant(9e4, 0.1, 6.283e3);
    const UncertaintySpec u = make_uncertainty(m, 0.8);
    CHECK(compute_sql(m, u, flux, -1.0) > compute_csl(m, u, flux, -1.0));
  }
}
