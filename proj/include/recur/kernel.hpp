#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "recur/sample.hpp"
#include "recur/step_function.hpp"
#include "recur/survival.hpp"

namespace recur {

enum class KernelFamily { epanechnikov, biweight };

/// Compactly supported kernel on [-1,1] with bandwidth h.
struct KernelSpec {
  KernelFamily family = KernelFamily::epanechnikov;
  double h = 0.2;
};

/// K(x): epanechnikov (3/4)(1-x^2), biweight (15/16)(1-x^2)^2, zero outside
/// [-1,1].
double kernel_eval(const KernelSpec& spec, double x);
/// K'(x), zero outside the support.
double kernel_deriv(const KernelSpec& spec, double x);
/// K''(x), zero outside the support.
double kernel_second(const KernelSpec& spec, double x);

/// Precomputed per-sample state shared by every kernel-regression query:
/// the rescaled processes of all subjects.
struct KernelContext {
  const Sample* sample = nullptr;
  const CensoringFit* fit = nullptr;
  std::vector<StepFunction> Y;

  static KernelContext build(const Sample& sample, const CensoringFit& fit);
};

/// Subject exclusion for leave-one-out evaluation.
using LeaveOut = std::optional<std::size_t>;

/// Estimated conditional cumulative mean at horizon t given index value u:
///   mu(t,u) = sum_j K((theta'Z_j - u)/h) Y_j(t) / sum_j K((theta'Z_j - u)/h),
/// an index-space locally weighted average of the rescaled processes. The
/// excluded subject (if any) appears in neither sum.
double mu_hat(double t, double u, const std::vector<double>& theta, const KernelSpec& spec,
              const KernelContext& ctx, LeaveOut leave_out = std::nullopt);

/// Convenience overload building the context on the fly.
double mu_hat(double t, double u, const std::vector<double>& theta, const KernelSpec& spec,
              const Sample& sample, const CensoringFit& fit, LeaveOut leave_out = std::nullopt);

/// Gradient of theta -> mu_hat(t, theta'z) with respect to the free index
/// components (indices 1..d-1; the first component is pinned at 1):
///   (1/D) sum_j K'((theta'Z_j - theta'z)/h) ((Z_j - z)_free / h) (Y_j(t) - mu),
/// obtained by differentiating the weighted-average form directly.
Eigen::VectorXd grad_mu_hat(double t, const std::vector<double>& z,
                            const std::vector<double>& theta, const KernelSpec& spec,
                            const KernelContext& ctx, LeaveOut leave_out = std::nullopt);

Eigen::VectorXd grad_mu_hat(double t, const std::vector<double>& z,
                            const std::vector<double>& theta, const KernelSpec& spec,
                            const Sample& sample, const CensoringFit& fit,
                            LeaveOut leave_out = std::nullopt);

/// Central finite-difference cross-check of grad_mu_hat (testing aid).
Eigen::VectorXd grad_mu_hat_fd(double t, const std::vector<double>& z,
                               const std::vector<double>& theta, const KernelSpec& spec,
                               const KernelContext& ctx, LeaveOut leave_out = std::nullopt,
                               double step = 1e-5);

/// Kernel density estimate of the index variable theta'Z at u:
/// (nh)^-1 sum_i K((theta'Z_i - u)/h). May return 0.
double density_hat(double u, const std::vector<double>& theta, const KernelSpec& spec,
                   const Sample& sample);

/// Subject-inclusion rule for the criteria. preliminary_set keeps subjects
/// inside a covariate box (default: componentwise [q, 1-q] sample-quantile
/// box); density_threshold keeps subjects whose estimated index density is
/// at least c (default c: the 5th percentile of the in-sample density
/// values, making the rule scale-free).
struct TrimmingSpec {
  enum class Mode { preliminary_set, density_threshold };
  Mode mode = Mode::density_threshold;

  /// preliminary_set: per-covariate [lo, hi]; empty = quantile box.
  std::vector<std::pair<double, double>> box;
  double box_quantile = 0.10;

  /// density_threshold: threshold c; 0 = resolve from the density quantile.
  double c = 0.0;
  double c_quantile = 0.05;
  /// Index direction at which the densities are evaluated; empty = the
  /// theta passed to the query (a preliminary estimate is placed here so
  /// the trimming set stays fixed while the criterion is minimized).
  std::vector<double> anchor_theta;
};

/// 1 if subject covariates z survive the trimming rule, else 0.
int trim_indicator(const std::vector<double>& z, const std::vector<double>& theta,
                   const TrimmingSpec& trim, const KernelSpec& spec, const Sample& sample);

/// Resolves the defaulted pieces of a TrimmingSpec against a sample: fills
/// the quantile box (preliminary mode) or the density threshold at the
/// anchor (density mode, anchor required in `theta` if unset).
TrimmingSpec resolve_trimming(const TrimmingSpec& trim, const std::vector<double>& theta,
                              const KernelSpec& spec, const Sample& sample);

/// Index values theta'Z_i for every subject.
std::vector<double> index_values(const std::vector<double>& theta, const Sample& sample);

}  // namespace recur
