#include "recur/step_function.hpp"

#include <algorithm>
#include <cstddef>
#include <utility>

#include "recur/errors.hpp"

namespace recur {

StepFunction::StepFunction(double initial, std::vector<double> jump_times,
                           std::vector<double> post_jump_values)
    : initial_(initial), times_(std::move(jump_times)), values_(std::move(post_jump_values)) {
  if (times_.size() != values_.size()) {
    throw DimensionMismatch("step function: jump times and values differ in length");
  }
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k - 1] < times_[k])) {
      throw TieViolation("step function: jump times must be strictly increasing");
    }
  }
}

StepFunction StepFunction::from_jumps(double initial, std::vector<double> jump_times,
                                      const std::vector<double>& jump_sizes) {
  if (jump_times.size() != jump_sizes.size()) {
    throw DimensionMismatch("step function: jump times and sizes differ in length");
  }
  std::vector<double> values(jump_sizes.size());
  double acc = initial;
  for (std::size_t k = 0; k < jump_sizes.size(); ++k) {
    acc += jump_sizes[k];
    values[k] = acc;
  }
  return StepFunction(initial, std::move(jump_times), std::move(values));
}

double StepFunction::operator()(double t) const {
  // Last jump time <= t determines the value.
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return initial_;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StepFunction::left_limit(double t) const {
  // Last jump time strictly below t.
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return initial_;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

}  // namespace recur
