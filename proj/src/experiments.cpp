#include "rpsmooth/experiments.hpp"

#include "rpsmooth/error.hpp"
#include "rpsmooth/limits.hpp"
#include "rpsmooth/montecarlo.hpp"
#include "rpsmooth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rpsmooth {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

bool is_resonant(ExperimentId id) {
  return id != ExperimentId::ou_delta && id != ExperimentId::ou_mu && id != ExperimentId::mc_validate;
}

bool is_optimizing(ExperimentId id) {
  return id == ExperimentId::res_zeta || id == ExperimentId::res_squeeze || id == ExperimentId::res_flux;
}

ProcessModel model_of(const SweepSpec& s) {
  return is_resonant(s.id) ? build_resonant(s.kappa, s.zeta, s.omega_r) : build_ou(s.lambda, s.kappa);
}

std::vector<double> sweep_grid(const SweepSpec& s) {
  return s.log_spaced ? log_grid(s.start, s.stop, s.count) : linear_grid(s.start, s.stop, s.count);
}

// Column layout of the figure sweeps.
struct Layout {
  bool csl = false;
  bool sql = false;
  bool optimizing = false;
  bool nominal = false;

  std::vector<std::string> columns() const {
    std::vector<std::string> c{"sweep_var", "sigma2_optimal", "sigma2_robust"};
    if (csl) c.push_back("csl");
    if (sql) c.push_back("sql");
    for (const char* n : {"delta_star_opt", "delta_star_rob", "r_pure_used", "R_sq_opt", "R_sq_rob", "fp_iters_opt",
                          "fp_iters_rob", "improvement_db", "squeezing_db", "l_sq", "r_m", "r_p"}) {
      c.emplace_back(n);
    }
    if (nominal) c.emplace_back("sigma2_optimal_nominal");
    if (optimizing) c.emplace_back("non_unimodal");
    return c;
  }
};

struct Row {
  std::vector<double> values;
  std::string error;
};

// Values of one figure-sweep point, filled progressively so a late failure
// still leaves the earlier columns.
struct PointValues {
  double x = kNaN, s_opt = kNaN, s_rob = kNaN, csl = kNaN, sql = kNaN;
  double d_opt = kNaN, d_rob = kNaN, r_pure = kNaN, R_opt = kNaN, R_rob = kNaN;
  double it_opt = kNaN, it_rob = kNaN, l_sq = kNaN, r_m = kNaN, r_p = kNaN;
  double nominal = kNaN, non_unimodal = kNaN;

  std::vector<double> pack(const Layout& l) const {
    std::vector<double> v{x, s_opt, s_rob};
    if (l.csl) v.push_back(csl);
    if (l.sql) v.push_back(sql);
    const double imp = (s_opt > 0.0 && s_rob > 0.0) ? improvement_db(s_opt, s_rob) : kNaN;
    const double db = std::isfinite(r_m) ? squeezing_db(r_m) : kNaN;
    for (double d : {d_opt, d_rob, r_pure, R_opt, R_rob, it_opt, it_rob, imp, db, l_sq, r_m, r_p}) v.push_back(d);
    if (l.nominal) v.push_back(nominal);
    if (l.optimizing) v.push_back(non_unimodal);
    return v;
  }

  void set_squeezing(const SqueezingConfig& sq) {
    r_pure = sq.r_pure;
    l_sq = sq.l_sq;
    r_m = sq.r_m;
    r_p = sq.r_p;
  }
};

// Fixed-delta evaluation of both estimators.
void eval_at_delta(PointValues& p, const ProcessModel& m, const UncertaintySpec& u, const SqueezingConfig& sq,
                   double delta, const AnalysisOptions& opts) {
  const ErrorReport o = evaluate_error(m, u, sq, EstimatorKind::optimal, delta, opts);
  p.s_opt = o.sigma_sq;
  p.d_opt = delta;
  p.R_opt = o.R_sq_converged;
  p.it_opt = o.fixed_point_iters;
  const ErrorReport r = evaluate_error(m, u, sq, EstimatorKind::robust, delta, opts);
  p.s_rob = r.sigma_sq;
  p.d_rob = delta;
  p.R_rob = r.R_sq_converged;
  p.it_rob = r.fixed_point_iters;
}

// Worst case over the delta grid of both estimators, with the fixed-point
// data of each maximiser.
void eval_worst(PointValues& p, const ProcessModel& m, const UncertaintySpec& u, const SqueezingConfig& sq,
                int delta_grid, const AnalysisOptions& opts) {
  const WorstCase wo = worst_case_error(m, u, sq, EstimatorKind::optimal, delta_grid, opts);
  const ErrorReport o = evaluate_error(m, u, sq, EstimatorKind::optimal, wo.delta_star, opts);
  p.s_opt = wo.sigma_w_sq;
  p.d_opt = wo.delta_star;
  p.R_opt = o.R_sq_converged;
  p.it_opt = o.fixed_point_iters;
  const WorstCase wr = worst_case_error(m, u, sq, EstimatorKind::robust, delta_grid, opts);
  const ErrorReport r = evaluate_error(m, u, sq, EstimatorKind::robust, wr.delta_star, opts);
  p.s_rob = wr.sigma_w_sq;
  p.d_rob = wr.delta_star;
  p.R_rob = r.R_sq_converged;
  p.it_rob = r.fixed_point_iters;
}

double worst_baseline(BaselineKind kind, const ProcessModel& m, const UncertaintySpec& u, double alpha_sq,
                      int delta_grid) {
  const BaselineCurve c = baseline_curve(kind, m, u, alpha_sq, linear_grid(-1.0, 1.0, delta_grid));
  return *std::max_element(c.values.begin(), c.values.end());
}

SqueezingConfig fixed_squeezing(const SweepSpec& s, double alpha_sq) {
  return s.squeeze_pair ? SqueezingConfig::from_pair(alpha_sq, s.r_m, s.r_p)
                        : SqueezingConfig::from_pure(alpha_sq, s.r_pure, s.losses.front());
}

template <class Fn>
Table run_rows(const std::vector<double>& xs, const Layout& layout, Exec exec, Fn point) {
  Table t;
  t.columns = layout.columns();
  const auto results = grid_map<Row>(exec, xs, [&](double x) {
    PointValues p;
    p.x = x;
    Row row;
    try {
      point(p, x);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.values = p.pack(layout);
    return row;
  });
  for (const auto& r : results) {
    if (!r.ok()) r.rethrow();
    t.rows.push_back(r.value->values);
    t.errors.push_back(r.value->error);
  }
  return t;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Table run_figure_sweep(const SweepSpec& s, Exec exec) {
  const ProcessModel base = model_of(s);
  const std::vector<double> xs = sweep_grid(s);
  const AnalysisOptions& opts = s.analysis;

  switch (s.id) {
    case ExperimentId::ou_delta:
    case ExperimentId::res_delta: {
      const UncertaintySpec u = make_uncertainty(base, s.mu);
      const SqueezingConfig sq = fixed_squeezing(s, s.alpha_sq);
      const bool res = s.id == ExperimentId::res_delta;
      return run_rows(xs, Layout{res, res, false, false}, exec, [&](PointValues& p, double delta) {
        p.set_squeezing(sq);
        eval_at_delta(p, base, u, sq, delta, opts);
        if (res) {
          p.csl = compute_csl(base, u, s.alpha_sq, delta);
          p.sql = compute_sql(base, u, s.alpha_sq, delta);
        }
      });
    }
    case ExperimentId::ou_mu:
    case ExperimentId::res_mu: {
      const SqueezingConfig sq = fixed_squeezing(s, s.alpha_sq);
      const bool res = s.id == ExperimentId::res_mu;
      return run_rows(xs, Layout{res, res, false, false}, exec, [&](PointValues& p, double mu) {
        const UncertaintySpec u = make_uncertainty(base, mu);
        p.set_squeezing(sq);
        eval_worst(p, base, u, sq, s.delta_grid, opts);
        if (res) {
          p.csl = worst_baseline(BaselineKind::csl, base, u, s.alpha_sq, s.delta_grid);
          p.sql = worst_baseline(BaselineKind::sql, base, u, s.alpha_sq, s.delta_grid);
        }
      });
    }
    case ExperimentId::res_zeta: {
      const double l_sq = s.losses.front();
      return run_rows(xs, Layout{false, false, true, true}, exec, [&](PointValues& p, double zeta) {
        const ProcessModel m = build_resonant(s.kappa, zeta, s.omega_r);
        const UncertaintySpec u = make_uncertainty(m, s.mu);
        const SqueezeOptimum opt = optimize_squeezing(s.objective, m, u, s.alpha_sq, l_sq, s.delta_grid, opts);
        const SqueezingConfig sq = SqueezingConfig::from_pure(s.alpha_sq, opt.r_star, l_sq);
        p.set_squeezing(sq);
        p.non_unimodal = opt.non_unimodal ? 1.0 : 0.0;
        p.nominal = evaluate_error(m, u, sq, EstimatorKind::optimal, 0.0, opts).sigma_sq;
        eval_worst(p, m, u, sq, s.delta_grid, opts);
      });
    }
    case ExperimentId::res_flux: {
      const UncertaintySpec u = make_uncertainty(base, s.mu);
      const double l_sq = s.losses.front();
      return run_rows(xs, Layout{false, false, true, true}, exec, [&](PointValues& p, double alpha_sq) {
        const SqueezeOptimum opt = optimize_squeezing(s.objective, base, u, alpha_sq, l_sq, s.delta_grid, opts);
        const SqueezingConfig sq = SqueezingConfig::from_pure(alpha_sq, opt.r_star, l_sq);
        p.set_squeezing(sq);
        p.non_unimodal = opt.non_unimodal ? 1.0 : 0.0;
        p.nominal = evaluate_error(base, u, sq, EstimatorKind::optimal, 0.0, opts).sigma_sq;
        eval_worst(p, base, u, sq, s.delta_grid, opts);
      });
    }
    case ExperimentId::res_squeeze: {
      const UncertaintySpec u = make_uncertainty(base, s.mu);
      const double csl = worst_baseline(BaselineKind::csl, base, u, s.alpha_sq, s.delta_grid);
      const Layout layout{true, false, false, true};
      Table all;
      for (double l_sq : s.losses) {
        Table block = run_rows(xs, layout, exec, [&](PointValues& p, double db) {
          const SqueezingConfig sq = SqueezingConfig::from_pure(s.alpha_sq, r_from_db(db), l_sq);
          p.set_squeezing(sq);
          p.csl = csl;
          p.nominal = evaluate_error(base, u, sq, EstimatorKind::optimal, 0.0, opts).sigma_sq;
          eval_worst(p, base, u, sq, s.delta_grid, opts);
        });
        all.columns = block.columns;
        all.rows.insert(all.rows.end(), block.rows.begin(), block.rows.end());
        all.errors.insert(all.errors.end(), block.errors.begin(), block.errors.end());

        // Squeezing optimum of this loss level.
        const std::string tag = "l_sq=" + fmt_short(l_sq);
        try {
          const SqueezeOptimum opt = optimize_squeezing(s.objective, base, u, s.alpha_sq, l_sq, s.delta_grid, opts);
          const SqueezingConfig sq = SqueezingConfig::from_pure(s.alpha_sq, opt.r_star, l_sq);
          PointValues p;
          eval_worst(p, base, u, sq, s.delta_grid, opts);
          all.summary.emplace_back(tag + " optimal r_pure", fmt(opt.r_star));
          all.summary.emplace_back(tag + " optimal squeezing_db", fmt(squeezing_db(sq.r_m)));
          all.summary.emplace_back(tag + " improvement_db", fmt(improvement_db(p.s_opt, p.s_rob)));
          all.summary.emplace_back(tag + " non_unimodal", opt.non_unimodal ? "1" : "0");
        } catch (const std::exception& e) {
          all.summary.emplace_back(tag + " optimum", std::string("failed: ") + e.what());
        }
      }
      return all;
    }
    case ExperimentId::mc_validate:
      break;
  }
  throw Error(ErrorKind::InvalidParam, "not a figure sweep");
}

struct McCase {
  double mu;
  double delta;
  EstimatorKind kind;
};

Table run_mc_validate(const SweepSpec& s, Exec exec) {
  const std::vector<McCase> cases{{0.0, 0.0, EstimatorKind::optimal},
                                  {0.0, 0.0, EstimatorKind::robust},
                                  {0.8, 1.0, EstimatorKind::optimal},
                                  {0.8, 1.0, EstimatorKind::robust}};
  const ProcessModel m = build_ou(s.lambda, s.kappa);
  const SqueezingConfig sq = fixed_squeezing(s, s.alpha_sq);

  Table t;
  t.columns = {"case",        "mu",       "delta",      "kind",        "analytic_f", "emp_f",    "stderr_f",
               "analytic_b",  "emp_b",    "stderr_b",   "analytic_fb", "emp_fb",     "stderr_fb", "analytic_s",
               "emp_s",       "stderr_s", "max_z",      "max_rel",     "pass"};
  std::vector<double> idx(cases.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);

  const auto results = grid_map<Row>(exec, idx, [&](double xi) {
    const auto i = static_cast<std::size_t>(xi);
    const McCase& c = cases[i];
    Row row;
    row.values.assign(t.columns.size(), kNaN);
    row.values[0] = xi;
    row.values[1] = c.mu;
    row.values[2] = c.delta;
    row.values[3] = c.kind == EstimatorKind::optimal ? 0.0 : 1.0;
    try {
      const UncertaintySpec u = make_uncertainty(m, c.mu);
      const ErrorReport rep = evaluate_error(m, u, sq, c.kind, c.delta, s.analysis);
      SimConfig cfg;
      cfg.dt = s.dt;
      cfg.T = s.T;
      cfg.seed = splitmix64(s.seed + i);
      cfg.delta = c.delta;
      cfg.mu = c.mu;
      cfg.kind = c.kind;
      cfg.combine = s.analysis.combine;
      const SimResult r = simulate_tracking(m, u, sq, cfg, rep);
      const double vals[] = {rep.sigma_f_sq,  r.emp_sigma_f_sq,  r.stderr_f,  rep.sigma_b_sq,  r.emp_sigma_b_sq,
                             r.stderr_b,      rep.sigma_fb_sq,   r.emp_sigma_fb_sq, r.stderr_fb, rep.sigma_sq,
                             r.emp_sigma_sq,  r.stderr_s};
      std::copy(std::begin(vals), std::end(vals), row.values.begin() + 4);
      double max_z = 0.0;
      double max_rel = 0.0;
      for (auto [a, e, se] : {std::tuple{rep.sigma_f_sq, r.emp_sigma_f_sq, r.stderr_f},
                              std::tuple{rep.sigma_b_sq, r.emp_sigma_b_sq, r.stderr_b},
                              std::tuple{rep.sigma_sq, r.emp_sigma_sq, r.stderr_s}}) {
        max_z = std::max(max_z, std::abs(e - a) / se);
        max_rel = std::max(max_rel, std::abs(e - a) / std::abs(a));
      }
      row.values[16] = max_z;
      row.values[17] = max_rel;
      row.values[18] = (max_z <= 3.0 && max_rel <= 0.05) ? 1.0 : 0.0;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return row;
  });
  for (const auto& r : results) {
    if (!r.ok()) r.rethrow();
    t.rows.push_back(r.value->values);
    t.errors.push_back(r.value->error);
  }
  return t;
}

void require(bool ok, const std::string& msg) {
  if (!ok) config_error(msg);
}

}  // namespace

ExperimentId parse_experiment_id(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(ExperimentId::mc_validate); ++i) {
    const auto id = static_cast<ExperimentId>(i);
    if (to_string(id) == s) return id;
  }
  config_error("unknown experiment '" + s + "'");
}

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::ou_delta: return "ou-delta";
    case ExperimentId::ou_mu: return "ou-mu";
    case ExperimentId::res_delta: return "res-delta";
    case ExperimentId::res_mu: return "res-mu";
    case ExperimentId::res_zeta: return "res-zeta";
    case ExperimentId::res_squeeze: return "res-squeeze";
    case ExperimentId::res_flux: return "res-flux";
    case ExperimentId::mc_validate: return "mc-validate";
  }
  return "?";
}

std::vector<std::string> experiment_ids() {
  std::vector<std::string> out;
  for (int i = 0; i <= static_cast<int>(ExperimentId::mc_validate); ++i) {
    out.push_back(to_string(static_cast<ExperimentId>(i)));
  }
  return out;
}

SweepSpec make_sweep_spec(ExperimentId id, const RunConfig& cfg) {
  SweepSpec s;
  s.id = id;
  const bool res = is_resonant(id);
  const bool optimizing = is_optimizing(id);

  if (res) {
    s.kappa = 9e4;
    s.zeta = 0.1;
    s.omega_r = 6.283e3;
    s.alpha_sq = 25e4;
    s.r_m = 0.48;
    s.r_p = 1.11;
  }

  switch (id) {
    case ExperimentId::ou_delta:
    case ExperimentId::res_delta:
      s.start = -1.0, s.stop = 1.0, s.count = 201;
      break;
    case ExperimentId::ou_mu:
    case ExperimentId::res_mu:
      s.start = 0.0, s.stop = 0.9, s.count = 19;
      break;
    case ExperimentId::res_zeta:
      s.start = 0.05, s.stop = 1.0, s.count = 20;
      s.squeeze_pair = false, s.optimize = true, s.losses = {0.33};
      s.objective = SqueezeObjective::nominal_error;
      break;
    case ExperimentId::res_squeeze:
      s.start = 0.0, s.stop = -20.0, s.count = 41;
      s.mu = 0.4;
      s.squeeze_pair = false, s.losses = {0.0, 0.33};
      s.objective = SqueezeObjective::nominal_error;
      break;
    case ExperimentId::res_flux:
      s.start = 4e4, s.stop = 1e6, s.count = 20, s.log_spaced = true;
      s.squeeze_pair = false, s.optimize = true, s.losses = {0.33};
      s.objective = SqueezeObjective::worst_robust;
      break;
    case ExperimentId::mc_validate:
      s.count = 4;
      break;
  }

  const bool sweeps_mu = id == ExperimentId::ou_mu || id == ExperimentId::res_mu;
  const std::string name = to_string(id);

  // Applicability.
  require(!(res && cfg.lambda), "lambda does not apply to the resonant model");
  require(!(!res && (cfg.zeta || cfg.omega_r)), "zeta and omega_r apply only to the resonant model");
  require(!(id == ExperimentId::res_zeta && cfg.zeta), "zeta is the sweep variable of res-zeta");
  require(!(id == ExperimentId::res_flux && cfg.alpha_sq), "alpha_sq is the sweep variable of res-flux");
  require(!(sweeps_mu && cfg.mu), "mu is the sweep variable of " + name);
  require(!(id == ExperimentId::mc_validate && (cfg.mu || cfg.grid || cfg.grid_start || cfg.grid_stop)),
          "mc-validate runs fixed reference points; mu and grid settings do not apply");
  require(!(id != ExperimentId::mc_validate && (cfg.dt || cfg.T)), "dt and T apply only to mc-validate");
  require(!(optimizing && (cfg.r_m || cfg.r_p || cfg.r_pure)),
          name + " optimizes the squeezing level; r_pure, r_m and r_p cannot be set");
  require(cfg.r_m.has_value() == cfg.r_p.has_value(), "r_m and r_p must be given together");
  require(!(cfg.r_m && cfg.r_pure), "give either r_pure or the pair r_m, r_p");
  require(!(cfg.r_m && cfg.l_sq), "loss applies to a pure squeezing level, not to an explicit r_m, r_p pair");

  if (cfg.lambda) s.lambda = *cfg.lambda;
  if (cfg.kappa) s.kappa = *cfg.kappa;
  if (cfg.zeta) s.zeta = *cfg.zeta;
  if (cfg.omega_r) s.omega_r = *cfg.omega_r;
  if (cfg.alpha_sq) s.alpha_sq = *cfg.alpha_sq;
  if (cfg.mu) s.mu = *cfg.mu;
  require(s.lambda > 0.0 && s.kappa > 0.0 && s.zeta > 0.0 && s.omega_r > 0.0 && s.alpha_sq > 0.0,
          "model parameters must be positive");
  require(s.mu >= 0.0 && s.mu < 1.0, "mu must lie in [0, 1)");

  if (!optimizing && id != ExperimentId::res_squeeze) {
    if (cfg.r_m) {
      s.r_m = *cfg.r_m;
      s.r_p = *cfg.r_p;
      require(s.r_m >= 0.0 && s.r_p >= 0.0, "r_m and r_p must be non-negative");
    } else if (cfg.r_pure || cfg.l_sq) {
      require(cfg.r_pure.has_value(), "loss needs a pure squeezing level r_pure");
      s.squeeze_pair = false;
      s.r_pure = *cfg.r_pure;
      s.losses = {cfg.l_sq.value_or(0.0)};
      require(s.r_pure >= 0.0, "r_pure must be non-negative");
    }
  } else if (cfg.l_sq) {
    s.losses = {*cfg.l_sq};
  }
  for (double l : s.losses) require(l >= 0.0 && l < 1.0, "loss must lie in [0, 1)");

  if (cfg.grid) s.count = *cfg.grid;
  if (cfg.grid_start) s.start = *cfg.grid_start;
  if (cfg.grid_stop) s.stop = *cfg.grid_stop;
  if (id != ExperimentId::mc_validate) {
    require(s.count >= 3, "grid must have at least 3 points");
    require(s.start != s.stop, "grid must be strictly monotone");
    switch (id) {
      case ExperimentId::ou_delta:
      case ExperimentId::res_delta:
        require(std::abs(s.start) <= 1.0 && std::abs(s.stop) <= 1.0, "delta grid must lie in [-1, 1]");
        break;
      case ExperimentId::ou_mu:
      case ExperimentId::res_mu:
        require(std::min(s.start, s.stop) >= 0.0 && std::max(s.start, s.stop) < 1.0, "mu grid must lie in [0, 1)");
        break;
      case ExperimentId::res_squeeze:
        require(std::max(s.start, s.stop) <= 0.0 && r_from_db(std::min(s.start, s.stop)) <= 3.0,
                "squeezing grid (dB) must lie in [-26, 0]");
        break;
      default:
        require(std::min(s.start, s.stop) > 0.0, "grid values must be positive");
    }
  }

  if (cfg.delta_grid) s.delta_grid = *cfg.delta_grid;
  require(s.delta_grid >= 3 && s.delta_grid % 2 == 1, "delta_grid must be odd and at least 3");
  if (cfg.combine) s.analysis.combine = *cfg.combine;
  if (cfg.backward_plant) s.analysis.backward_plant = *cfg.backward_plant;
  if (cfg.seed) s.seed = *cfg.seed;
  if (cfg.dt) s.dt = *cfg.dt;
  if (cfg.T) s.T = *cfg.T;
  require(s.dt > 0.0 && s.T > 0.0, "dt and T must be positive");
  s.out_path = cfg.out.value_or(name + ".csv");
  return s;
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorKind::InvalidParam, "no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

bool Table::has_errors() const {
  return std::any_of(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); });
}

Table run_sweep(const SweepSpec& spec, Exec exec) {
  return spec.id == ExperimentId::mc_validate ? run_mc_validate(spec, exec) : run_figure_sweep(spec, exec);
}

void write_csv(const Table& t, std::ostream& out) {
  for (const auto& c : t.columns) out << c << ',';
  out << "error\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (double v : t.rows[i]) out << fmt(v) << ',';
    std::string e = t.errors[i];
    std::replace(e.begin(), e.end(), '\n', ' ');
    if (e.find_first_of(",\"") != std::string::npos) {
      std::string q = "\"";
      for (char ch : e) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      e = q + "\"";
    }
    out << e << '\n';
  }
}

void write_csv(const Table& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path);
  write_csv(t, out);
  out.flush();
  if (!out) throw Error(ErrorKind::ConfigError, "writing " + path + " failed");
}

SqueezeOptimum minimize_scalar(const std::function<double(double)>& fn, double lo, double hi, double tol) {
  if (!(hi > lo) || !(tol > 0.0)) throw Error(ErrorKind::InvalidParam, "invalid search interval");
  std::vector<std::pair<double, double>> seen;
  auto eval = [&](double r) {
    double v = fn(r);
    if (!std::isfinite(v)) v = kInf;
    seen.emplace_back(r, v);
    return v;
  };

  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto golden = [&](double a, double b) {
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    while (b - a >= tol) {
      if (f1 <= f2) {
        b = x2, x2 = x1, f2 = f1;
        x1 = b - g * (b - a);
        f1 = eval(x1);
      } else {
        a = x1, x1 = x2, f1 = f2;
        x2 = a + g * (b - a);
        f2 = eval(x2);
      }
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
  };

  const double f_lo = eval(lo);
  const double f_hi = eval(hi);
  auto [r, v] = golden(lo, hi);

  // Unimodality check over everything evaluated so far: along r the finite
  // values may only fall and then rise (steps below a relative noise floor
  // are ignored), and infeasible points may only sit at the interval ends.
  std::vector<std::pair<double, double>> pts = seen;
  std::sort(pts.begin(), pts.end());
  bool unimodal = true;
  {
    std::size_t first_finite = pts.size();
    std::size_t last_finite = 0;
    double scale = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!std::isfinite(pts[i].second)) continue;
      first_finite = std::min(first_finite, i);
      last_finite = i;
      scale = std::max(scale, std::abs(pts[i].second));
    }
    const double noise = 1e-9 * scale;
    bool rising = false;
    double prev = kNaN;
    for (std::size_t i = first_finite; i <= last_finite && i < pts.size(); ++i) {
      const double v = pts[i].second;
      if (!std::isfinite(v)) {
        unimodal = false;
        break;
      }
      if (std::isfinite(prev)) {
        if (v > prev + noise) rising = true;
        if (v < prev - noise && rising) unimodal = false;
      }
      prev = v;
    }
    if (first_finite == pts.size()) unimodal = false;
  }

  SqueezeOptimum out;
  if (unimodal) {
    out.r_star = r, out.value = v;
    if (f_lo < out.value) out.r_star = lo, out.value = f_lo;
    if (f_hi < out.value) out.r_star = hi, out.value = f_hi;
  } else {
    out.non_unimodal = true;
    constexpr int kGrid = 61;
    const std::vector<double> grid = linear_grid(lo, hi, kGrid);
    std::size_t best = 0;
    double best_v = kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double gv = eval(grid[i]);
      if (gv < best_v) best_v = gv, best = i;
    }
    if (!std::isfinite(best_v)) throw Error(ErrorKind::NoAdmissibleSolution, "objective is nowhere finite");
    const double a = grid[best == 0 ? 0 : best - 1];
    const double b = grid[std::min(best + 1, grid.size() - 1)];
    const auto [rr, vv] = golden(a, b);
    out.r_star = grid[best], out.value = best_v;
    if (vv < best_v) out.r_star = rr, out.value = vv;
  }
  out.evaluations = static_cast<int>(seen.size());
  if (!std::isfinite(out.value)) throw Error(ErrorKind::NoAdmissibleSolution, "objective is nowhere finite");
  return out;
}

double squeeze_objective(SqueezeObjective objective, const ProcessModel& model, const UncertaintySpec& unc,
                         double alpha_sq, double r_pure, double l_sq, int delta_grid, const AnalysisOptions& opts) {
  try {
    const SqueezingConfig sq = SqueezingConfig::from_pure(alpha_sq, r_pure, l_sq);
    if (objective == SqueezeObjective::nominal_error) {
      return evaluate_error(model, unc, sq, EstimatorKind::optimal, 0.0, opts).sigma_sq;
    }
    return worst_case_error(model, unc, sq, EstimatorKind::robust, delta_grid, opts).sigma_w_sq;
  } catch (const Error&) {
    return kInf;
  }
}

SqueezeOptimum optimize_squeezing(SqueezeObjective objective, const ProcessModel& model, const UncertaintySpec& unc,
                                  double alpha_sq, double l_sq, int delta_grid, const AnalysisOptions& opts) {
  return minimize_scalar(
      [&](double r) { return squeeze_objective(objective, model, unc, alpha_sq, r, l_sq, delta_grid, opts); }, 0.0,
      3.0, 1e-3);
}

}  // namespace rpsmooth
