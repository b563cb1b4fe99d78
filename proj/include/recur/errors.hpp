#pragma once

#include <stdexcept>
#include <string>

namespace recur {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// -- data validation ---------------------------------------------------------

/// Pooled observation/event times collide (ties are rejected by default).
struct TieViolation : Error {
  using Error::Error;
};

/// A time that must be nonnegative (or strictly positive) is not.
struct NegativeTime : Error {
  using Error::Error;
};

/// An event time exceeds the subject's observation time.
struct EventAfterObservation : NegativeTime {
  using NegativeTime::NegativeTime;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct EmptySample : Error {
  using Error::Error;
};

// -- file I/O -----------------------------------------------------------------

/// Malformed input (syntax level); message carries line/field context.
struct ParseError : Error {
  using Error::Error;
};

/// Structurally valid input that violates the documented schema.
struct SchemaError : Error {
  using Error::Error;
};

/// Invalid configuration (CLI flags, config files, domain parameters).
struct ConfigError : Error {
  using Error::Error;
};

// -- estimation --------------------------------------------------------------

/// A 1 - G(s-) style denominator vanished where a division is required.
struct DegenerateDenominator : Error {
  using Error::Error;
};

/// No covariate index value falls within one bandwidth of the query point.
struct EmptyWindow : Error {
  using Error::Error;
};

/// Every subject was excluded by the trimming indicator.
struct AllTrimmed : Error {
  using Error::Error;
};

/// No optimizer start produced a finite converged minimum.
struct OptimizerDiverged : Error {
  using Error::Error;
};

/// Sigma-hat is numerically singular (condition number >= 1e12).
struct SingularSigma : Error {
  using Error::Error;
};

/// Every candidate weight measure failed the variance computation.
struct AllCandidatesSingular : Error {
  using Error::Error;
};

/// More than the tolerated fraction of replications failed.
struct ExcessiveFailures : Error {
  using Error::Error;
};

}  // namespace recur
