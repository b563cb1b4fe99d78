#pragma once

#include <functional>
#include <vector>

namespace recur {

struct OptimizerConfig {
  int max_iterations = 2000;   // per start
  double diameter_tol = 1e-6;  // max vertex distance, infinity norm
  double spread_tol = 1e-10;   // worst minus best objective value
  int multistarts = 5;
};

struct OptimizerResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;  // summed over starts
  bool converged = false;
  int starts_converged = 0;
};

/// Objective value used for points the objective cannot score (outside the
/// box, or evaluation raised); large but finite so the simplex contracts
/// away from them.
inline constexpr double kInfeasibleValue = 1e100;

/// Simplex descent over a box with deterministic low-discrepancy restarts.
/// Points outside [lo, hi] score kInfeasibleValue and are never passed to f.
/// Each start converges when the simplex diameter and the objective spread
/// both fall below their tolerances; the best vertex over all starts wins,
/// earlier starts win ties. Raises OptimizerDiverged only when every start
/// exhausts its iteration budget.
OptimizerResult minimize_box(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& lo, const std::vector<double>& hi,
                             const OptimizerConfig& config = {});

/// Radical-inverse fraction of `index` in the given base (the restart grid).
double radical_inverse(unsigned index, unsigned base);

}  // namespace recur
