#include "recur/fit_report.hpp"

#include "json.hpp"

namespace recur {

std::string fit_report_to_json(const FitReport& report) {
  nlohmann::json j;
  j["theta_hat"] = report.theta_hat;
  j["free_components"] = report.free_components();
  j["chosen_measure"] = {{"support", report.chosen_measure.atoms},
                         {"masses", report.chosen_measure.masses}};
  j["chosen_bandwidth"] = report.chosen_bandwidth;
  j["criterion_value"] = report.criterion_value;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  if (report.variance_matrix.size() > 0) {
    nlohmann::json v = nlohmann::json::array();
    for (Eigen::Index r = 0; r < report.variance_matrix.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(report.variance_matrix.cols()));
      for (Eigen::Index c = 0; c < report.variance_matrix.cols(); ++c) {
        row[static_cast<std::size_t>(c)] = report.variance_matrix(r, c);
      }
      v.push_back(row);
    }
    j["variance_matrix"] = v;
  } else {
    j["variance_matrix"] = nullptr;
  }
  if (report.mse_estimate) {
    j["mse_estimate"] = *report.mse_estimate;
  } else {
    j["mse_estimate"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace recur
