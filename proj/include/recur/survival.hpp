#pragma once

#include <vector>

#include "recur/sample.hpp"
#include "recur/step_function.hpp"

namespace recur {

/// Product-limit estimate of the censoring law together with the empirical
/// law of the follow-up times. G_hat jumps only at censored follow-up times;
/// H_hat jumps 1/n at every follow-up time.
struct CensoringFit {
  StepFunction G_hat;
  StepFunction H_hat;
  std::vector<long> at_risk_counts;  // at-risk size at each jump of G_hat

  // Per-jump tabulation of G_hat used by the influence function: jump time s,
  // increment dG(s), and the cumulative sum of dG(s)/[(1-H(s-))(1-G(s-))].
  std::vector<double> g_jump_times;
  std::vector<double> g_jump_sizes;
  std::vector<double> eta_integral_prefix;

  /// Sum over jumps s of G_hat with s <= x of dG(s)/[(1-H(s-))(1-G(s-))].
  double eta_integral(double x) const;
  /// Same with strict inequality s < x.
  double eta_integral_strict(double x) const;
};

/// Kaplan-Meier estimator of the censoring distribution:
/// 1 - G(t) = prod over T_i <= t of (1 - 1/#{j: T_j >= T_i})^(1-delta_i).
/// Only censored subjects (delta = 0) contribute factors below one.
CensoringFit kaplan_meier_censoring(const Sample& sample);

/// Rescaled event process Y(t) = sum over event times s <= t of
/// 1/(1 - G(s-)): each observed jump is inflated by the inverse probability
/// of remaining uncensored just before it.
StepFunction rescaled_process(const Subject& subject, const CensoringFit& fit);

/// First-order expansion term of the product-limit estimator evaluated for
/// one observation (T, delta) at time t:
///   (1-delta) I(T <= t) / (1 - H(T-))
///     - sum over jumps s of G with s <= t, s <= T of
///         dG(s) / [(1 - H(s-)) (1 - G(s-))].
double eta_hat(const CensoringFit& fit, double T, bool delta, double t);

/// eta_hat with its time argument taken as a left limit (t-), which is how
/// it enters the inner integral of the variance formulas.
double eta_hat_left(const CensoringFit& fit, double T, bool delta, double t);

}  // namespace recur
