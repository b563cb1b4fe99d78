#include "recur/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "recur/errors.hpp"

namespace recur {

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw EmptySample("quantile of no values");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace recur
