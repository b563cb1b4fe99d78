#pragma once

#include <vector>

namespace recur {

/// Quantile with linear interpolation between order statistics
/// (position q*(m-1) in the sorted values). Input need not be sorted.
double sample_quantile(std::vector<double> values, double q);

}  // namespace recur
