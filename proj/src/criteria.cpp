#include "recur/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <utility>

#include "panel.hpp"
#include "recur/errors.hpp"
#include "recur/stats.hpp"

namespace recur {

namespace {

using detail::AtomGrid;
using detail::SortedIndex;

std::vector<double> assemble_theta(const std::vector<double>& free) {
  std::vector<double> theta(free.size() + 1);
  theta[0] = 1.0;
  std::copy(free.begin(), free.end(), theta.begin() + 1);
  return theta;
}

// Criterion with a fixed inclusion vector J. Kernel sums run over sorted
// index windows, so one evaluation costs O(n log n + n * window * atoms).
double semiparametric_value(const std::vector<double>& theta, const KernelSpec& spec,
                            const AtomGrid& grid, const std::vector<std::vector<double>>& ymat,
                            const Sample& sample, const std::vector<char>& J,
                            bool leave_one_out) {
  const std::size_t n = sample.n();
  std::size_t kept = 0;
  for (char j : J) kept += j != 0;
  if (kept == 0) throw AllTrimmed("every subject removed by trimming");
  if (grid.size() == 0) return 0.0;

  const SortedIndex s = detail::build_sorted_index(theta, sample);
  const std::size_t m = grid.size();
  std::vector<double> mu(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!J[i]) continue;
    const auto [lo, hi] = s.window(s.v[i], spec.h);
    double denom = 0.0;
    std::fill(mu.begin(), mu.end(), 0.0);
    for (std::size_t pj = lo; pj < hi; ++pj) {
      const std::size_t j = s.ord[pj];
      if (leave_one_out && j == i) continue;
      const double w = kernel_eval(spec, (s.vsorted[pj] - s.v[i]) / spec.h);
      if (w == 0.0) continue;
      denom += w;
      const std::vector<double>& yj = ymat[j];
      for (std::size_t k = 0; k < m; ++k) mu[k] += w * yj[k];
    }
    if (denom <= 0.0) {
      throw EmptyWindow("no neighboring subject index within bandwidth");
    }
    const std::vector<double>& yi = ymat[i];
    for (std::size_t k = 0; k < m; ++k) {
      const double m_ik = mu[k] / denom;
      acc += grid.mass[k] * m_ik * (m_ik - 2.0 * yi[k]);
    }
  }
  return acc / static_cast<double>(n);
}

std::vector<char> box_inclusion(const TrimmingSpec& resolved, const Sample& sample) {
  std::vector<char> J(sample.n(), 1);
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const std::vector<double>& z = sample.subjects[i].Z;
    if (resolved.box.size() != z.size()) {
      throw DimensionMismatch("trimming box dimension does not match covariates");
    }
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (z[k] < resolved.box[k].first || z[k] > resolved.box[k].second) {
        J[i] = 0;
        break;
      }
    }
  }
  return J;
}

// Density-rule inclusion at a fixed anchor direction; resolves the
// threshold from the anchor densities when unset.
std::vector<char> density_inclusion(const TrimmingSpec& trim, const std::vector<double>& anchor,
                                    const KernelSpec& spec, const Sample& sample) {
  const SortedIndex s = detail::build_sorted_index(anchor, sample);
  const std::vector<double> dens = detail::densities_at_subjects(s, spec, sample.n());
  double c = trim.c;
  if (c == 0.0) c = sample_quantile(dens, trim.c_quantile);
  std::vector<char> J(sample.n());
  for (std::size_t i = 0; i < sample.n(); ++i) J[i] = dens[i] >= c ? 1 : 0;
  return J;
}

struct StageResult {
  std::vector<double> theta;
  double value;
  int iterations;
  bool converged;
};

// One box-constrained minimization of `value_at` over the free components,
// treating evaluation failures as infeasible points. If no feasible point
// was ever scored, the first captured failure is rethrown.
StageResult minimize_stage(const std::function<double(const std::vector<double>&)>& value_at,
                           const ThetaDomain& domain, const OptimizerConfig& config) {
  std::exception_ptr first_failure;
  auto objective = [&](const std::vector<double>& free) {
    try {
      return value_at(assemble_theta(free));
    } catch (const Error&) {
      if (!first_failure) first_failure = std::current_exception();
      return kInfeasibleValue;
    }
  };
  OptimizerResult r = minimize_box(objective, domain.lower(), domain.upper(), config);
  if (r.value >= kInfeasibleValue && first_failure) std::rethrow_exception(first_failure);
  return {assemble_theta(r.x), r.value, r.iterations, r.converged};
}

}  // namespace

ParametricModel linear_parametric_model(std::size_t d, double intercept) {
  ParametricModel m;
  m.d = d;
  m.mu0 = [intercept](double t, const std::vector<double>& z, const std::vector<double>& theta) {
    double v = intercept;
    for (std::size_t k = 0; k < z.size(); ++k) v += theta[k] * z[k];
    return v * t;
  };
  m.grad_theta_mu0 = [](double t, const std::vector<double>& z,
                        const std::vector<double>& theta) {
    (void)theta;
    std::vector<double> g(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) g[k] = z[k] * t;
    return g;
  };
  return m;
}

ThetaDomain ThetaDomain::uniform(std::size_t d, double lo, double hi) {
  if (d < 1) throw DimensionMismatch("index dimension must be at least 1");
  ThetaDomain dom;
  dom.free_bounds.assign(d - 1, {lo, hi});
  return dom;
}

std::vector<double> ThetaDomain::lower() const {
  std::vector<double> v(free_bounds.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = free_bounds[k].first;
  return v;
}

std::vector<double> ThetaDomain::upper() const {
  std::vector<double> v(free_bounds.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = free_bounds[k].second;
  return v;
}

std::vector<double> ThetaDomain::assemble(const std::vector<double>& free) const {
  if (free.size() != free_bounds.size()) {
    throw DimensionMismatch("free component count does not match domain");
  }
  return assemble_theta(free);
}

bool ThetaDomain::contains(const std::vector<double>& free) const {
  if (free.size() != free_bounds.size()) return false;
  for (std::size_t k = 0; k < free.size(); ++k) {
    if (free[k] < free_bounds[k].first || free[k] > free_bounds[k].second) return false;
  }
  return true;
}

ThetaDomain ThetaDomain::shrink_around(const std::vector<double>& theta,
                                       double half_width) const {
  if (theta.size() != free_bounds.size() + 1) {
    throw DimensionMismatch("index dimension does not match domain");
  }
  ThetaDomain out = *this;
  for (std::size_t k = 0; k < free_bounds.size(); ++k) {
    const double center = theta[k + 1];
    out.free_bounds[k].first = std::max(free_bounds[k].first, center - half_width);
    out.free_bounds[k].second = std::min(free_bounds[k].second, center + half_width);
  }
  return out;
}

double criterion_parametric(const std::vector<double>& theta, const ParametricModel& model,
                            const DiscreteMeasure& w, const Sample& sample,
                            const CensoringFit& fit) {
  const AtomGrid grid = detail::atoms_within(w, sample.t_max());
  if (grid.size() == 0) return 0.0;
  const KernelContext ctx = KernelContext::build(sample, fit);
  const auto ymat = detail::rescaled_at_atoms(ctx, grid);
  const std::size_t n = sample.n();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double>& z = sample.subjects[i].Z;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double m0 = model.mu0(grid.t[k], z, theta);
      acc += grid.mass[k] * m0 * (m0 - 2.0 * ymat[i][k]);
    }
  }
  return acc / static_cast<double>(n);
}

std::vector<double> criterion_parametric_grad(const std::vector<double>& theta,
                                              const ParametricModel& model,
                                              const DiscreteMeasure& w, const Sample& sample,
                                              const CensoringFit& fit) {
  const AtomGrid grid = detail::atoms_within(w, sample.t_max());
  const std::size_t d = theta.size();
  std::vector<double> g(d - 1, 0.0);
  if (grid.size() == 0) return g;
  const KernelContext ctx = KernelContext::build(sample, fit);
  const auto ymat = detail::rescaled_at_atoms(ctx, grid);
  const std::size_t n = sample.n();
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double>& z = sample.subjects[i].Z;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double m0 = model.mu0(grid.t[k], z, theta);
      const std::vector<double> gm = model.grad_theta_mu0(grid.t[k], z, theta);
      const double scale = 2.0 * grid.mass[k] * (m0 - ymat[i][k]);
      for (std::size_t c = 1; c < d; ++c) g[c - 1] += scale * gm[c];
    }
  }
  for (double& x : g) x /= static_cast<double>(n);
  return g;
}

FitReport fit_parametric(const ParametricModel& model, const DiscreteMeasure& w,
                         const Sample& sample, const CensoringFit& fit, const ThetaDomain& domain,
                         const OptimizerConfig& config) {
  const AtomGrid grid = detail::atoms_within(w, sample.t_max());
  const KernelContext ctx = KernelContext::build(sample, fit);
  const auto ymat = detail::rescaled_at_atoms(ctx, grid);
  const std::size_t n = sample.n();

  auto value_at = [&](const std::vector<double>& theta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double>& z = sample.subjects[i].Z;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double m0 = model.mu0(grid.t[k], z, theta);
        acc += grid.mass[k] * m0 * (m0 - 2.0 * ymat[i][k]);
      }
    }
    return acc / static_cast<double>(n);
  };

  StageResult r = minimize_stage(value_at, domain, config);
  FitReport report;
  report.theta_hat = std::move(r.theta);
  report.chosen_measure = w;
  report.criterion_value = r.value;
  report.iterations = r.iterations;
  report.converged = r.converged;
  return report;
}

double criterion_semiparametric(const std::vector<double>& theta, const KernelSpec& spec,
                                const DiscreteMeasure& w, const Sample& sample,
                                const CensoringFit& fit, const TrimmingSpec& trim,
                                bool leave_one_out) {
  const AtomGrid grid = detail::atoms_within(w, sample.t_max());
  const KernelContext ctx = KernelContext::build(sample, fit);
  const auto ymat = detail::rescaled_at_atoms(ctx, grid);

  std::vector<char> J;
  if (trim.mode == TrimmingSpec::Mode::preliminary_set) {
    J = box_inclusion(resolve_trimming(trim, theta, spec, sample), sample);
  } else {
    const std::vector<double>& anchor =
        trim.anchor_theta.empty() ? theta : trim.anchor_theta;
    J = density_inclusion(trim, anchor, spec, sample);
  }
  return semiparametric_value(theta, spec, grid, ymat, sample, J, leave_one_out);
}

FitReport fit_semiparametric(const KernelSpec& spec, const DiscreteMeasure& w,
                             const Sample& sample, const CensoringFit& fit,
                             const ThetaDomain& domain, const TrimmingSpec& trim,
                             const OptimizerConfig& config, bool leave_one_out) {
  const AtomGrid grid = detail::atoms_within(w, sample.t_max());
  const KernelContext ctx = KernelContext::build(sample, fit);
  const auto ymat = detail::rescaled_at_atoms(ctx, grid);

  // Stage one always runs under box trimming; the user's box is honored in
  // preliminary mode, otherwise the default quantile box pins down a
  // neighborhood for the density rule.
  TrimmingSpec box_trim = trim;
  box_trim.mode = TrimmingSpec::Mode::preliminary_set;
  if (trim.mode != TrimmingSpec::Mode::preliminary_set) box_trim.box.clear();
  const std::vector<char> J1 =
      box_inclusion(resolve_trimming(box_trim, {}, spec, sample), sample);

  auto stage_value = [&](const std::vector<char>& J) {
    return [&, J](const std::vector<double>& theta) {
      return semiparametric_value(theta, spec, grid, ymat, sample, J, leave_one_out);
    };
  };

  StageResult s1 = minimize_stage(stage_value(J1), domain, config);

  FitReport report;
  report.chosen_measure = w;
  report.chosen_bandwidth = spec.h;

  if (trim.mode == TrimmingSpec::Mode::preliminary_set) {
    report.theta_hat = std::move(s1.theta);
    report.criterion_value = s1.value;
    report.iterations = s1.iterations;
    report.converged = s1.converged;
    return report;
  }

  const std::vector<double> anchor =
      trim.anchor_theta.empty() ? s1.theta : trim.anchor_theta;
  const std::vector<char> J2 = density_inclusion(trim, anchor, spec, sample);
  const ThetaDomain narrowed = domain.shrink_around(s1.theta, 0.5);
  StageResult s2 = minimize_stage(stage_value(J2), narrowed, config);

  report.theta_hat = std::move(s2.theta);
  report.criterion_value = s2.value;
  report.iterations = s1.iterations + s2.iterations;
  report.converged = s2.converged;
  return report;
}

FitReport fit_joint_theta_h(KernelFamily family, const std::vector<double>& h_grid,
                            const DiscreteMeasure& w, const Sample& sample,
                            const CensoringFit& fit, const ThetaDomain& domain,
                            const TrimmingSpec& trim, const OptimizerConfig& config,
                            bool leave_one_out) {
  std::vector<double> grid = h_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw ConfigError("bandwidth grid is empty");
  for (double h : grid) {
    if (!(h > 0.0)) throw ConfigError("bandwidths must be positive");
  }

  FitReport best;
  bool have = false;
  int iterations = 0;
  for (double h : grid) {
    FitReport r = fit_semiparametric({family, h}, w, sample, fit, domain, trim, config,
                                     leave_one_out);
    iterations += r.iterations;
    if (!have || r.criterion_value < best.criterion_value) {
      best = std::move(r);
      have = true;
    }
  }
  best.iterations = iterations;
  return best;
}

}  // namespace recur
