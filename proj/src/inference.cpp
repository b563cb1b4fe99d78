#include "recur/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "panel.hpp"
#include "recur/errors.hpp"

namespace recur {

namespace {

using detail::SortedIndex;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::Index free_dim(const Sample& sample) {
  return static_cast<Eigen::Index>(sample.d()) - 1;
}

struct PooledEvent {
  double time;
  std::size_t owner;
};

std::vector<PooledEvent> pooled_events(const Sample& sample) {
  std::vector<PooledEvent> ev;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    for (double e : sample.subjects[i].events) ev.push_back({e, i});
  }
  std::sort(ev.begin(), ev.end(),
            [](const PooledEvent& a, const PooledEvent& b) { return a.time < b.time; });
  return ev;
}

MatrixXd invert_spd(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  const VectorXd& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(lo > 0.0) || hi / lo >= 1e12) {
    throw SingularSigma("gradient Gram matrix is singular or ill-conditioned");
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

PsiAtoms compute_psi_atoms(const std::vector<double>& theta_hat, const KernelSpec& spec,
                           const std::vector<double>& atoms, const Sample& sample,
                           const CensoringFit& fit) {
  const std::size_t n = sample.n();
  const std::size_t d = sample.d();
  if (theta_hat.size() != d) throw DimensionMismatch("index dimension does not match sample");
  const Eigen::Index p = free_dim(sample);
  const std::size_t m = atoms.size();

  PsiAtoms out;
  out.atoms = atoms;
  out.n = n;
  out.A.assign(m, MatrixXd::Zero(p, static_cast<Eigen::Index>(n)));
  out.S.assign(m, MatrixXd::Zero(p, p));
  if (p == 0 || m == 0) return out;

  const KernelContext ctx = KernelContext::build(sample, fit);
  detail::AtomGrid grid;
  grid.t = atoms;
  grid.mass.assign(m, 1.0);
  const auto ymat = detail::rescaled_at_atoms(ctx, grid);
  const SortedIndex s = detail::build_sorted_index(theta_hat, sample);

  // Per-subject kernel windows (all subjects included; the kernel weight at
  // zero keeps every denominator positive).
  std::vector<std::vector<std::size_t>> nbr(n);
  std::vector<std::vector<double>> kw(n), kd(n);
  std::vector<double> denom(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = s.window(s.v[i], spec.h);
    for (std::size_t pj = lo; pj < hi; ++pj) {
      const std::size_t j = s.ord[pj];
      const double x = (s.v[j] - s.v[i]) / spec.h;
      nbr[i].push_back(j);
      kw[i].push_back(kernel_eval(spec, x));
      kd[i].push_back(kernel_deriv(spec, x));
      denom[i] += kw[i].back();
    }
  }

  // mu and grad mu at every (subject, atom).
  MatrixXd mu(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  std::vector<MatrixXd> grad(m, MatrixXd::Zero(p, static_cast<Eigen::Index>(n)));
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double>& zi = sample.subjects[i].Z;
    for (std::size_t k = 0; k < m; ++k) {
      double acc = 0.0;
      for (std::size_t q = 0; q < nbr[i].size(); ++q) acc += kw[i][q] * ymat[nbr[i][q]][k];
      mu(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = acc / denom[i];
    }
    for (std::size_t q = 0; q < nbr[i].size(); ++q) {
      if (kd[i][q] == 0.0) continue;
      const std::size_t j = nbr[i][q];
      VectorXd zdiff(p);
      for (Eigen::Index c = 0; c < p; ++c) {
        zdiff[c] = sample.subjects[j].Z[static_cast<std::size_t>(c) + 1] -
                   zi[static_cast<std::size_t>(c) + 1];
      }
      for (std::size_t k = 0; k < m; ++k) {
        const double scale =
            kd[i][q] *
            (ymat[j][k] - mu(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))) /
            (denom[i] * spec.h);
        grad[k].col(static_cast<Eigen::Index>(i)) += scale * zdiff;
      }
    }
  }

  for (std::size_t k = 0; k < m; ++k) {
    out.S[k] = grad[k] * grad[k].transpose() / static_cast<double>(n);
  }

  // Second influence term. For each pooled event e owned by subject l, the
  // estimated curve mu(., theta'Z_j) jumps by K_jl / (D_j (1 - G(e-))), so
  //   B_i(k) = sum over events e <= t_k of eta_i(e-) * G_k(e),
  //   G_k(e) = (1/n) / (1 - G(e-)) * sum_j grad mu(t_k, Z_j) K_jl / D_j.
  const std::vector<PooledEvent> events = pooled_events(sample);
  const std::size_t ne = events.size();
  if (ne > 0) {
    std::vector<MatrixXd> vkl(m, MatrixXd::Zero(p, static_cast<Eigen::Index>(n)));
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t q = 0; q < nbr[j].size(); ++q) {
        const double w = kw[j][q] / denom[j];
        if (w == 0.0) continue;
        const Eigen::Index l = static_cast<Eigen::Index>(nbr[j][q]);
        for (std::size_t k = 0; k < m; ++k) {
          vkl[k].col(l) += w * grad[k].col(static_cast<Eigen::Index>(j));
        }
      }
    }

    std::vector<double> yw(ne);
    for (std::size_t e = 0; e < ne; ++e) {
      const double g = 1.0 - fit.G_hat.left_limit(events[e].time);
      if (g <= 0.0) {
        throw DegenerateDenominator("censoring estimate reaches 1 before event time");
      }
      yw[e] = 1.0 / (g * static_cast<double>(n));
    }

    // eta_i(e-) for every subject at every pooled event time.
    MatrixXd eta(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ne));
    for (std::size_t i = 0; i < n; ++i) {
      const Subject& sub = sample.subjects[i];
      for (std::size_t e = 0; e < ne; ++e) {
        eta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e)) =
            eta_hat_left(fit, sub.T, sub.delta, events[e].time);
      }
    }

    for (std::size_t k = 0; k < m; ++k) {
      MatrixXd gke(p, static_cast<Eigen::Index>(ne));
      std::size_t active = 0;
      for (std::size_t e = 0; e < ne; ++e) {
        if (events[e].time > atoms[k]) break;
        gke.col(static_cast<Eigen::Index>(e)) =
            yw[e] * vkl[k].col(static_cast<Eigen::Index>(events[e].owner));
        ++active;
      }
      if (active > 0) {
        out.A[k] = (gke.leftCols(static_cast<Eigen::Index>(active)) *
                    eta.leftCols(static_cast<Eigen::Index>(active)).transpose());
      }
    }
  }

  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double resid =
          ymat[i][k] - mu(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      out.A[k].col(static_cast<Eigen::Index>(i)) +=
          resid * grad[k].col(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

VarianceReport assemble_variance(const PsiAtoms& atoms, const std::vector<double>& masses) {
  if (masses.size() != atoms.atoms.size()) {
    throw DimensionMismatch("mass vector does not align with atom table");
  }
  const Eigen::Index p = atoms.A.empty()
                             ? 0
                             : atoms.A.front().rows();
  const Eigen::Index n = static_cast<Eigen::Index>(atoms.n);

  VarianceReport r;
  r.xi_hat = VectorXd::Zero(p);
  r.sigma_hat = MatrixXd::Zero(p, p);
  r.delta_hat = MatrixXd::Zero(p, p);
  r.v_hat = MatrixXd::Zero(p, p);
  if (p == 0) return r;

  MatrixXd psi = MatrixXd::Zero(p, n);
  for (std::size_t k = 0; k < masses.size(); ++k) {
    if (masses[k] == 0.0) continue;
    psi += masses[k] * atoms.A[k];
    r.sigma_hat += masses[k] * atoms.S[k];
  }
  r.xi_hat = psi.rowwise().mean();
  const MatrixXd centered = psi.colwise() - r.xi_hat;
  r.delta_hat = centered * centered.transpose() / static_cast<double>(n);

  const MatrixXd sigma_inv = invert_spd(r.sigma_hat);
  const MatrixXd v = sigma_inv * r.delta_hat * sigma_inv;
  r.v_hat = 0.5 * (v + v.transpose());
  r.mse_hat = (sigma_inv * r.xi_hat).squaredNorm();
  return r;
}

VarianceReport variance_report(const std::vector<double>& theta_hat, const KernelSpec& spec,
                               const DiscreteMeasure& w, const Sample& sample,
                               const CensoringFit& fit) {
  const detail::AtomGrid grid = detail::atoms_within(w, sample.t_max());
  if (grid.size() == 0 && free_dim(sample) > 0) {
    // No active atom means the Gram matrix is identically zero; report that as
    // singular instead of assembling a degenerate zero-dimensional table.
    throw SingularSigma("weight measure has no mass in the observed range");
  }
  const PsiAtoms atoms = compute_psi_atoms(theta_hat, spec, grid.t, sample, fit);
  return assemble_variance(atoms, grid.mass);
}

Eigen::VectorXd psi_hat(const Subject& subject, const std::vector<double>& theta_hat,
                        const KernelSpec& spec, const DiscreteMeasure& w, const Sample& sample,
                        const CensoringFit& fit) {
  std::size_t idx = sample.n();
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const Subject& s = sample.subjects[i];
    if (s.T == subject.T && s.delta == subject.delta && s.Z == subject.Z &&
        s.events == subject.events) {
      idx = i;
      break;
    }
  }
  if (idx == sample.n()) throw ConfigError("subject does not belong to the sample");

  const detail::AtomGrid grid = detail::atoms_within(w, sample.t_max());
  const PsiAtoms atoms = compute_psi_atoms(theta_hat, spec, grid.t, sample, fit);
  VectorXd psi = VectorXd::Zero(free_dim(sample));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    psi += grid.mass[k] * atoms.A[k].col(static_cast<Eigen::Index>(idx));
  }
  return psi;
}

WeightSelection select_weight_measure(const std::vector<DiscreteMeasure>& candidates,
                                      const DiscreteMeasure& pilot_w, const KernelSpec& spec,
                                      const Sample& sample, const CensoringFit& fit,
                                      const ThetaDomain& domain, const TrimmingSpec& trim,
                                      const OptimizerConfig& config, bool leave_one_out) {
  if (candidates.empty()) throw ConfigError("no weight-measure candidates");

  const FitReport pilot =
      fit_semiparametric(spec, pilot_w, sample, fit, domain, trim, config, leave_one_out);

  // One atom table over the union of candidate supports serves every
  // candidate; each candidate is then just a mass vector on that union.
  const double upper = sample.t_max();
  std::vector<double> union_atoms;
  for (const DiscreteMeasure& w : candidates) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w.atoms[k] <= upper && w.masses[k] != 0.0) union_atoms.push_back(w.atoms[k]);
    }
  }
  std::sort(union_atoms.begin(), union_atoms.end());
  union_atoms.erase(std::unique(union_atoms.begin(), union_atoms.end()), union_atoms.end());

  const PsiAtoms atoms = compute_psi_atoms(pilot.theta_hat, spec, union_atoms, sample, fit);

  const double inf = std::numeric_limits<double>::infinity();
  WeightSelection sel;
  sel.mse_table.assign(candidates.size(), inf);
  bool have = false;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const DiscreteMeasure& w = candidates[c];
    std::vector<double> masses(union_atoms.size(), 0.0);
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w.atoms[k] > upper || w.masses[k] == 0.0) continue;
      const auto it = std::lower_bound(union_atoms.begin(), union_atoms.end(), w.atoms[k]);
      masses[static_cast<std::size_t>(it - union_atoms.begin())] += w.masses[k];
    }
    if (std::all_of(masses.begin(), masses.end(), [](double m) { return m == 0.0; })) {
      continue;  // zero Gram matrix; same fate as a singular candidate
    }
    try {
      sel.mse_table[c] = assemble_variance(atoms, masses).mse_hat;
    } catch (const SingularSigma&) {
      continue;
    }
    if (!have || sel.mse_table[c] < sel.mse_table[sel.chosen_index]) {
      sel.chosen_index = c;
      have = true;
    }
  }
  if (!have) {
    throw AllCandidatesSingular("every candidate weight measure yields a singular Gram matrix");
  }

  sel.chosen = candidates[sel.chosen_index];
  sel.report = fit_semiparametric(spec, sel.chosen, sample, fit, domain, trim, config,
                                  leave_one_out);
  const VarianceReport vr =
      variance_report(sel.report.theta_hat, spec, sel.chosen, sample, fit);
  sel.report.variance_matrix = vr.v_hat;
  sel.report.mse_estimate = vr.mse_hat;
  return sel;
}

}  // namespace recur
