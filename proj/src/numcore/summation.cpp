#include "evalbench/numcore/summation.hpp"

#include <cmath>
#include <vector>

#include "evalbench/numcore/error.hpp"

namespace evalbench::numcore {

double exact_sum(std::span<const double> xs) {
  std::vector<double> partials;
  for (double x : xs) {
    if (!std::isfinite(x)) throw NumericError("exact_sum: non-finite input");
    std::size_t i = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    if (!std::isfinite(x)) throw NumericError("exact_sum: overflow");
    partials.resize(i);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  // Add partials from the top, then fix a halfway case in the last step.
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

}  // namespace evalbench::numcore
