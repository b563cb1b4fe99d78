#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "recur/criteria.hpp"
#include "recur/fit_report.hpp"
#include "recur/kernel.hpp"
#include "recur/measure.hpp"
#include "recur/sample.hpp"
#include "recur/survival.hpp"

namespace recur {

/// Sandwich variance pieces for the free index components.
struct VarianceReport {
  Eigen::VectorXd xi_hat;     // mean influence vector
  Eigen::MatrixXd sigma_hat;  // weighted Gram matrix of the mu gradients
  Eigen::MatrixXd delta_hat;  // centered second moment of the influence vectors
  Eigen::MatrixXd v_hat;      // sigma^-1 delta sigma^-1
  double mse_hat = 0.0;       // |sigma^-1 xi|^2
};

/// Everything about the influence decomposition that depends on the index
/// estimate and the atom locations but not on the atom masses: per atom t_k,
/// the per-subject influence contribution A[k] (column i holds subject i's
/// vector) and the gradient Gram matrix S[k]. Any measure supported on
/// these atoms is then a cheap mass-weighted assembly, which is what makes
/// scanning a large measure lattice affordable.
struct PsiAtoms {
  std::vector<double> atoms;
  std::vector<Eigen::MatrixXd> A;  // per atom: (d-1) x n
  std::vector<Eigen::MatrixXd> S;  // per atom: (d-1) x (d-1)
  std::size_t n = 0;
};

PsiAtoms compute_psi_atoms(const std::vector<double>& theta_hat, const KernelSpec& spec,
                           const std::vector<double>& atoms, const Sample& sample,
                           const CensoringFit& fit);

/// Mass-weighted assembly of a PsiAtoms table into the sandwich estimate;
/// `masses` aligns with `atoms.atoms` (zero entries allowed). Raises
/// SingularSigma when the Gram matrix is not safely invertible
/// (nonpositive eigenvalue or condition number >= 1e12).
VarianceReport assemble_variance(const PsiAtoms& atoms, const std::vector<double>& masses);

/// Influence vector of one subject:
///   int (Y_i(t) - mu(t, theta'Z_i)) grad mu(t, Z_i) dw(t)
///   + int [ sum over event jumps s <= t of eta_{s-}(T_i, delta_i)
///           n^-1 sum_j grad mu(t, Z_j) d mu(s, theta'Z_j) ] dw(t).
/// The subject must belong to `sample` (matched by exact field equality).
Eigen::VectorXd psi_hat(const Subject& subject, const std::vector<double>& theta_hat,
                        const KernelSpec& spec, const DiscreteMeasure& w, const Sample& sample,
                        const CensoringFit& fit);

/// Full-sample sandwich variance under weight measure w at theta_hat.
VarianceReport variance_report(const std::vector<double>& theta_hat, const KernelSpec& spec,
                               const DiscreteMeasure& w, const Sample& sample,
                               const CensoringFit& fit);

struct WeightSelection {
  DiscreteMeasure chosen;
  FitReport report;
  std::size_t chosen_index = 0;
  std::vector<double> mse_table;  // estimated mse per candidate (inf = singular)
};

/// Adaptive choice of the weight measure: fit once under pilot_w, score
/// every candidate's estimated mse at that pilot estimate (one shared
/// PsiAtoms over the union of candidate supports), pick the smallest
/// (earliest wins ties), refit under the winner, and attach its variance
/// report. Candidates whose Gram matrix is singular are skipped; if all
/// are, AllCandidatesSingular is raised.
WeightSelection select_weight_measure(const std::vector<DiscreteMeasure>& candidates,
                                      const DiscreteMeasure& pilot_w, const KernelSpec& spec,
                                      const Sample& sample, const CensoringFit& fit,
                                      const ThetaDomain& domain, const TrimmingSpec& trim,
                                      const OptimizerConfig& config = {},
                                      bool leave_one_out = true);

}  // namespace recur
