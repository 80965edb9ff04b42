#pragma once

// Grid evaluation kernels. Every sweep in the library reduces to "evaluate an
// independent function at each point of a 1-D grid, then gather by index".
// grid_map_serial is the reference implementation; grid_map_omp fans points
// out over OpenMP threads. Both write results[i] for point i only, so the
// gathered output is identical regardless of scheduling.

#include "rpsmooth/error.hpp"

#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <omp.h>

namespace rpsmooth {

enum class Exec { serial, parallel };

template <class T>
struct PointResult {
  std::optional<T> value;
  std::string error;  // empty on success
  std::exception_ptr failure;

  bool ok() const { return value.has_value(); }
  /// Rethrows the original exception of a failed point.
  void rethrow() const {
    if (failure) std::rethrow_exception(failure);
  }
};

namespace detail {

template <class T, class Fn>
PointResult<T> eval_point(Fn& fn, double x) {
  PointResult<T> r;
  try {
    r.value = fn(x);
  } catch (const std::exception& e) {
    r.error = e.what();
    r.failure = std::current_exception();
  }
  return r;
}

}  // namespace detail

template <class T, class Fn>
std::vector<PointResult<T>> grid_map_serial(std::span<const double> xs, Fn&& fn) {
  std::vector<PointResult<T>> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = detail::eval_point<T>(fn, xs[i]);
  return out;
}

template <class T, class Fn>
std::vector<PointResult<T>> grid_map_omp(std::span<const double> xs, Fn&& fn) {
  std::vector<PointResult<T>> out(xs.size());
  const long n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = detail::eval_point<T>(fn, xs[static_cast<std::size_t>(i)]);
  }
  return out;
}

template <class T, class Fn>
std::vector<PointResult<T>> grid_map(Exec exec, std::span<const double> xs, Fn&& fn) {
  // Nested regions would oversubscribe; inner sweeps fall back to serial.
  if (exec == Exec::parallel && !omp_in_parallel()) return grid_map_omp<T>(xs, fn);
  return grid_map_serial<T>(xs, fn);
}

/// Uniform grid with exact endpoints; an odd count contains 0 exactly when
/// the interval is symmetric.
std::vector<double> linear_grid(double start, double stop, int count);
std::vector<double> log_grid(double start, double stop, int count);

}  // namespace rpsmooth
