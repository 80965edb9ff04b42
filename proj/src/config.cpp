#include "rpsmooth/config.hpp"

#include "rpsmooth/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace rpsmooth {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw Error(ErrorKind::ConfigError, "key '" + key + "': '" + value + "' is not " + expected);
}

double to_double(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (value.empty() || end != begin + value.size() || errno == ERANGE || !std::isfinite(v)) {
    bad_value(key, value, "a finite number");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (value.empty() || end != begin + value.size() || errno == ERANGE) bad_value(key, value, "an integer");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  errno = 0;
  if (value.empty() || value[0] == '-') bad_value(key, value, "an unsigned 64-bit integer");
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end != begin + value.size() || errno == ERANGE) bad_value(key, value, "an unsigned 64-bit integer");
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const long long v = to_integer(key, value);
  if (v < -2147483647LL || v > 2147483647LL) bad_value(key, value, "a 32-bit integer");
  return static_cast<int>(v);
}

template <class T>
void merge_field(std::optional<T>& dst, const std::optional<T>& src) {
  if (src) dst = src;
}

}  // namespace

CombineMode parse_combine_mode(const std::string& s) {
  if (s == "scalar-first") return CombineMode::scalar_first;
  if (s == "matrix-first") return CombineMode::matrix_first;
  throw Error(ErrorKind::ConfigError, "combine must be scalar-first or matrix-first, got '" + s + "'");
}

BackwardPlant parse_backward_plant(const std::string& s) {
  if (s == "same-process") return BackwardPlant::same_process;
  if (s == "time-reversed") return BackwardPlant::time_reversed;
  throw Error(ErrorKind::ConfigError, "backward_plant must be same-process or time-reversed, got '" + s + "'");
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "out") {
    if (value.empty()) bad_value(key, value, "a path");
    cfg.out = value;
  } else if (key == "mu") {
    cfg.mu = to_double(key, value);
  } else if (key == "grid") {
    cfg.grid = to_int(key, value);
  } else if (key == "combine") {
    cfg.combine = parse_combine_mode(value);
  } else if (key == "backward_plant") {
    cfg.backward_plant = parse_backward_plant(value);
  } else if (key == "loss" || key == "l_sq") {
    cfg.l_sq = to_double(key, value);
  } else if (key == "seed") {
    cfg.seed = to_u64(key, value);
  } else if (key == "threads") {
    cfg.threads = to_int(key, value);
  } else if (key == "lambda") {
    cfg.lambda = to_double(key, value);
  } else if (key == "kappa") {
    cfg.kappa = to_double(key, value);
  } else if (key == "zeta") {
    cfg.zeta = to_double(key, value);
  } else if (key == "omega_r") {
    cfg.omega_r = to_double(key, value);
  } else if (key == "alpha_sq") {
    cfg.alpha_sq = to_double(key, value);
  } else if (key == "r_pure") {
    cfg.r_pure = to_double(key, value);
  } else if (key == "r_m") {
    cfg.r_m = to_double(key, value);
  } else if (key == "r_p") {
    cfg.r_p = to_double(key, value);
  } else if (key == "grid_start") {
    cfg.grid_start = to_double(key, value);
  } else if (key == "grid_stop") {
    cfg.grid_stop = to_double(key, value);
  } else if (key == "delta_grid") {
    cfg.delta_grid = to_int(key, value);
  } else if (key == "dt") {
    cfg.dt = to_double(key, value);
  } else if (key == "T") {
    cfg.T = to_double(key, value);
  } else {
    throw Error(ErrorKind::ConfigError, "unknown key '" + key + "'");
  }
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw Error(ErrorKind::ConfigError, where + "expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "loss") key = "l_sq";
    if (key.empty()) throw Error(ErrorKind::ConfigError, where + "empty key");
    if (!seen.insert(key).second) throw Error(ErrorKind::ConfigError, where + "duplicate key '" + key + "'");
    try {
      set_config_value(cfg, key, value);
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, where + e.what());
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

RunConfig merge_config(const RunConfig& base, const RunConfig& over) {
  RunConfig r = base;
  merge_field(r.out, over.out);
  merge_field(r.mu, over.mu);
  merge_field(r.grid, over.grid);
  merge_field(r.combine, over.combine);
  merge_field(r.backward_plant, over.backward_plant);
  merge_field(r.l_sq, over.l_sq);
  merge_field(r.seed, over.seed);
  merge_field(r.threads, over.threads);
  merge_field(r.lambda, over.lambda);
  merge_field(r.kappa, over.kappa);
  merge_field(r.zeta, over.zeta);
  merge_field(r.omega_r, over.omega_r);
  merge_field(r.alpha_sq, over.alpha_sq);
  merge_field(r.r_pure, over.r_pure);
  merge_field(r.r_m, over.r_m);
  merge_field(r.r_p, over.r_p);
  merge_field(r.grid_start, over.grid_start);
  merge_field(r.grid_stop, over.grid_stop);
  merge_field(r.delta_grid, over.delta_grid);
  merge_field(r.dt, over.dt);
  merge_field(r.T, over.T);
  return r;
}

}  // namespace rpsmooth
