#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "recur/fit_report.hpp"
#include "recur/kernel.hpp"
#include "recur/measure.hpp"
#include "recur/nelder_mead.hpp"
#include "recur/sample.hpp"
#include "recur/survival.hpp"

namespace recur {

/// User-supplied regression function mu0(t, z; theta) and its full
/// theta-gradient.
struct ParametricModel {
  std::function<double(double t, const std::vector<double>& z, const std::vector<double>& theta)>
      mu0;
  std::function<std::vector<double>(double t, const std::vector<double>& z,
                                    const std::vector<double>& theta)>
      grad_theta_mu0;
  std::size_t d = 0;
};

/// mu0(t, z; theta) = (theta'z + intercept) * t, the workhorse linear-index
/// specification.
ParametricModel linear_parametric_model(std::size_t d, double intercept = 0.0);

/// Search box for the free index components; the first component stays 1.
struct ThetaDomain {
  std::vector<std::pair<double, double>> free_bounds;

  static ThetaDomain uniform(std::size_t d, double lo, double hi);
  std::vector<double> lower() const;
  std::vector<double> upper() const;
  std::vector<double> assemble(const std::vector<double>& free) const;
  bool contains(const std::vector<double>& free) const;
  ThetaDomain shrink_around(const std::vector<double>& theta, double half_width) const;
};

/// Weighted least-squares distance between the model curve and the rescaled
/// processes:
///   n^-1 sum_i int_0^Tmax mu0(t,Z_i)^2 dw - 2 n^-1 sum_i int_0^Tmax
///   Y_i(t) mu0(t,Z_i) dw,
/// with atoms of w above the largest follow-up time dropped.
double criterion_parametric(const std::vector<double>& theta, const ParametricModel& model,
                            const DiscreteMeasure& w, const Sample& sample,
                            const CensoringFit& fit);

/// Gradient of criterion_parametric in the free components, assembled from
/// the model's own gradient (cross-checked against finite differences in the
/// test suite).
std::vector<double> criterion_parametric_grad(const std::vector<double>& theta,
                                              const ParametricModel& model,
                                              const DiscreteMeasure& w, const Sample& sample,
                                              const CensoringFit& fit);

FitReport fit_parametric(const ParametricModel& model, const DiscreteMeasure& w,
                         const Sample& sample, const CensoringFit& fit, const ThetaDomain& domain,
                         const OptimizerConfig& config = {});

/// Same criterion with the kernel estimate in place of mu0 and a trimming
/// indicator multiplying each subject's contribution. The kernel estimate at
/// subject i leaves subject i out unless leave_one_out is disabled.
double criterion_semiparametric(const std::vector<double>& theta, const KernelSpec& spec,
                                const DiscreteMeasure& w, const Sample& sample,
                                const CensoringFit& fit, const TrimmingSpec& trim,
                                bool leave_one_out = true);

/// Two-stage minimization: a preliminary fit under box trimming pins down
/// the neighborhood, then (in density mode) the trimming switches to the
/// density rule anchored at the preliminary estimate and the search box
/// shrinks to half-width 0.5 around it. preliminary_set mode stops after
/// stage one.
FitReport fit_semiparametric(const KernelSpec& spec, const DiscreteMeasure& w,
                             const Sample& sample, const CensoringFit& fit,
                             const ThetaDomain& domain, const TrimmingSpec& trim,
                             const OptimizerConfig& config = {}, bool leave_one_out = true);

/// Runs fit_semiparametric at every bandwidth in the grid and keeps the
/// (theta, h) pair with the smallest criterion value; ties go to the
/// smaller bandwidth.
FitReport fit_joint_theta_h(KernelFamily family, const std::vector<double>& h_grid,
                            const DiscreteMeasure& w, const Sample& sample,
                            const CensoringFit& fit, const ThetaDomain& domain,
                            const TrimmingSpec& trim, const OptimizerConfig& config = {},
                            bool leave_one_out = true);

}  // namespace recur
