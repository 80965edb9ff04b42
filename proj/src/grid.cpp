#include "rpsmooth/parallel.hpp"

#include <cmath>

namespace rpsmooth {

std::vector<double> linear_grid(double start, double stop, int count) {
  if (count < 2) throw Error(ErrorKind::InvalidParam, "grid needs at least two points");
  std::vector<double> xs(static_cast<std::size_t>(count));
  const double last = count - 1;
  for (int i = 0; i < count; ++i) xs[static_cast<std::size_t>(i)] = (start * (last - i) + stop * i) / last;
  return xs;
}

std::vector<double> log_grid(double start, double stop, int count) {
  if (!(start > 0.0 && stop > 0.0)) throw Error(ErrorKind::InvalidParam, "log grid needs positive bounds");
  std::vector<double> xs = linear_grid(std::log(start), std::log(stop), count);
  for (double& x : xs) x = std::exp(x);
  xs.front() = start;
  xs.back() = stop;
  return xs;
}

}  // namespace rpsmooth
