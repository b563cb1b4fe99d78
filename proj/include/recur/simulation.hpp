#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "recur/criteria.hpp"
#include "recur/kernel.hpp"
#include "recur/measure.hpp"
#include "recur/rng.hpp"
#include "recur/sample.hpp"

namespace recur {

struct WeibullLaw {
  double shape = 1.0;
  double scale = 1.0;
};

/// Atoms 0.1, 0.2, ..., 1.2 shared by the default measures below.
std::vector<double> default_atom_grid();

/// Unit mass at every default atom.
DiscreteMeasure all_ones_measure();

/// Every measure keeping mass 1 on atoms up to 0.8 and choosing a mass in
/// {0.25, 0.5, 0.75, 1} at each of 0.9, 1.0, 1.1, 1.2; enumerated in
/// ascending lexicographic order of those four tail masses (256 candidates).
std::vector<DiscreteMeasure> default_weight_lattice();

/// Which estimation pipeline each replication runs.
enum class Pipeline { fixed_w, adaptive_w, adaptive_h };

/// Full description of one replication study: data-generating process,
/// estimation pipeline, and seeding.
struct SimulationConfig {
  std::size_t n = 100;
  std::size_t reps = 100;
  std::vector<double> theta0 = {1.0, 1.6, 1.25, 0.7};
  double intercept = 5.0;
  double z_lo = 1.0;
  double z_hi = 2.0;
  WeibullLaw death{10.0, 1.09};
  WeibullLaw censoring{4.0, 1.38};

  Pipeline pipeline = Pipeline::fixed_w;
  KernelSpec kernel{KernelFamily::epanechnikov, 0.2};
  std::vector<double> h_grid;                 // adaptive_h
  DiscreteMeasure base_w = all_ones_measure();
  std::vector<DiscreteMeasure> lattice;       // adaptive_w; empty = default
  ThetaDomain domain = ThetaDomain::uniform(4, 0.0, 3.0);
  TrimmingSpec trim;
  OptimizerConfig optimizer;
  bool leave_one_out = true;

  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  std::size_t d() const { return theta0.size(); }
};

/// One generated subject together with its latent terminal and censoring
/// times (diagnostics only; estimation never sees them).
struct GeneratedSubject {
  Subject subject;
  double death_time = 0.0;
  double censor_time = 0.0;
};

/// Draws Z, the latent times, T = min, delta = I(death <= censoring), the
/// Poisson event count at rate (theta0'Z + intercept) * T, and the event
/// times as uniform draws on (0, T). Consumes the stream in a fixed order.
GeneratedSubject generate_subject(const SimulationConfig& config, RngStream& rng);

/// Validated n-subject sample for one replication; every subject gets its
/// own stream keyed by (seed, rep, subject index), so any replication can
/// be regenerated in isolation.
Sample generate_sample(const SimulationConfig& config, std::uint64_t rep);

struct RepRecord {
  std::size_t rep = 0;
  bool ok = false;
  std::string error;
  std::vector<double> theta_free;
  std::vector<double> chosen_masses;
  double bandwidth = 0.0;
  double criterion = 0.0;
  double mse_hat = 0.0;  // estimated mse of the selected measure (adaptive_w)
  std::size_t events_total = 0;
  std::size_t censored_count = 0;
};

struct ReplicationSummary {
  Eigen::VectorXd bias;       // mean theta_hat_free - theta0_free
  Eigen::MatrixXd variance;   // empirical covariance of theta_hat_free
  double mse = 0.0;           // mean |theta_hat_free - theta0_free|^2
  std::vector<double> mean_selected_masses;
  double mean_events_per_subject = 0.0;
  double censoring_fraction = 0.0;
  std::size_t reps_total = 0;
  std::size_t reps_used = 0;
  std::size_t failures = 0;
};

struct ReplicationStudy {
  ReplicationSummary summary;
  std::vector<RepRecord> records;
};

/// Runs all replications (config.jobs workers pulling from a shared
/// counter) and aggregates in replication order, so results are
/// byte-identical for any worker count. Aborts with ExcessiveFailures when
/// more than 5% of replications fail.
ReplicationStudy run_replications(const SimulationConfig& config);

/// Failure threshold shared by the runner and its tests.
bool failures_excessive(std::size_t failures, std::size_t reps);

std::string summary_to_json(const SimulationConfig& config, const ReplicationSummary& summary);
std::string records_to_csv(const std::vector<RepRecord>& records, std::size_t free_dim,
                           std::size_t mass_dim);

std::string config_to_json(const SimulationConfig& config);
SimulationConfig config_from_json(const std::string& text);

/// One pass/fail line of a reproduction report.
struct ComparisonRow {
  std::string label;
  double reference = 0.0;
  double produced = 0.0;
  std::string tolerance;
  bool pass = false;
  bool informational = false;  // reported but does not gate the outcome
};

struct TableReproduction {
  int table_id = 0;
  std::vector<ReplicationStudy> studies;
  std::vector<ComparisonRow> rows;
  bool all_pass = false;
};

/// Builds the study configuration(s) behind one reference table, runs them,
/// and compares the reproduced statistics against the reference values
/// under the documented tolerance bands.
TableReproduction reproduce_table(int table_id, std::uint64_t seed, std::size_t jobs);

/// The configurations reproduce_table runs, exposed for reuse.
std::vector<SimulationConfig> table_configs(int table_id, std::uint64_t seed, std::size_t jobs);

std::string comparison_to_text(const TableReproduction& rep);
std::string comparison_to_json(const TableReproduction& rep);

}  // namespace recur
