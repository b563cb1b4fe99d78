#pragma once

#include <cstddef>
#include <vector>

namespace recur {

/// Right-continuous piecewise-constant function with left-limit queries.
/// Carrier for counting processes N, the Kaplan-Meier estimates G-hat and
/// H-hat, and the rescaled processes Y-hat. Immutable after construction.
class StepFunction {
 public:
  /// Constant function.
  explicit StepFunction(double initial = 0.0) : initial_(initial) {}

  /// jump_times must be strictly increasing; values[k] is the value on
  /// [jump_times[k], jump_times[k+1]).
  StepFunction(double initial, std::vector<double> jump_times, std::vector<double> post_jump_values);

  /// Builds from jump increments instead of absolute post-jump values.
  static StepFunction from_jumps(double initial, std::vector<double> jump_times,
                                 const std::vector<double>& jump_sizes);

  /// Value at t (right-continuous).
  double operator()(double t) const;

  /// Value at t- (limit from the left; strict inequality on jump times).
  double left_limit(double t) const;

  double initial_value() const { return initial_; }
  const std::vector<double>& jump_times() const { return times_; }
  const std::vector<double>& post_jump_values() const { return values_; }
  std::size_t jump_count() const { return times_.size(); }

 private:
  double initial_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

}  // namespace recur
