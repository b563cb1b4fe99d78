#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "recur/measure.hpp"

namespace recur {

/// Result of one model fit: the estimated index (first component pinned at
/// 1), the weight measure and bandwidth it was computed under, optimizer
/// diagnostics, and, when the variance pipeline ran, the sandwich variance
/// of the free components plus the estimated mean squared error.
struct FitReport {
  std::vector<double> theta_hat;
  DiscreteMeasure chosen_measure;
  double chosen_bandwidth = 0.0;
  double criterion_value = 0.0;
  int iterations = 0;
  bool converged = false;

  Eigen::MatrixXd variance_matrix;  // (d-1)x(d-1); empty until computed
  std::optional<double> mse_estimate;

  std::vector<double> free_components() const {
    return {theta_hat.begin() + 1, theta_hat.end()};
  }
};

/// JSON rendering used by the command-line tool and the run records.
std::string fit_report_to_json(const FitReport& report);

}  // namespace recur
