#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace recur {

/// One individual's observed data: follow-up time T, death indicator delta
/// (true when the terminal event was observed before censoring), covariate
/// vector Z, and the strictly increasing recurrent event times in (0, T].
struct Subject {
  double T = 0.0;
  bool delta = false;
  std::vector<double> Z;
  std::vector<double> events;
};

/// A cross-section of subjects sharing one covariate dimension.
struct Sample {
  std::vector<Subject> subjects;

  std::size_t n() const { return subjects.size(); }
  std::size_t d() const;

  /// Largest observation time T_(n).
  double t_max() const;
};

struct ValidationOptions {
  /// When true, colliding times are separated by a deterministic
  /// perturbation of magnitude 1e-9 * max T derived from `seed`.
  bool jitter = false;
  std::uint64_t seed = 0;
};

/// Checks every invariant (nonnegative times, events inside (0, T],
/// consistent dimension, no ties anywhere in the pooled set of follow-up
/// and event times) and returns the sample in canonical form: event times
/// sorted within subject, subjects ordered by T. The canonical order makes
/// every downstream reduction independent of input order, so permuting
/// subjects cannot change results even at the bit level.
Sample validate_sample(const Sample& raw, const ValidationOptions& opts = {});

}  // namespace recur
