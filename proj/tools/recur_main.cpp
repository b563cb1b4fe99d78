// Command-line front end: fit models on data files, run replication
// studies, reproduce the reference tables.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "recur/criteria.hpp"
#include "recur/errors.hpp"
#include "recur/fit_report.hpp"
#include "recur/inference.hpp"
#include "recur/kernel.hpp"
#include "recur/measure.hpp"
#include "recur/sample_io.hpp"
#include "recur/simulation.hpp"
#include "recur/stats.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 ok, 2 data/config, 3 estimation, 4 excessive replication
// failures, 5 reproduction mismatch.
constexpr int kExitData = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitFailures = 4;
constexpr int kExitMismatch = 5;

int classify(const std::exception& e) {
  if (dynamic_cast<const recur::ExcessiveFailures*>(&e)) return kExitFailures;
  if (dynamic_cast<const recur::OptimizerDiverged*>(&e) ||
      dynamic_cast<const recur::AllTrimmed*>(&e) ||
      dynamic_cast<const recur::EmptyWindow*>(&e) ||
      dynamic_cast<const recur::DegenerateDenominator*>(&e) ||
      dynamic_cast<const recur::SingularSigma*>(&e) ||
      dynamic_cast<const recur::AllCandidatesSingular*>(&e)) {
    return kExitEstimation;
  }
  return kExitData;
}

// All output files go through a temp-file rename so a failed run never
// leaves a partial artifact behind.
void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw recur::ConfigError("cannot open " + tmp.string() + " for writing");
    os << content;
    if (!os) throw recur::ConfigError("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw recur::ConfigError("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Ties in a data file are an error unless a jitter seed is supplied.
recur::Sample load_data(const std::string& path, const std::optional<std::uint64_t>& seed) {
  const auto fmt = ends_with(path, ".csv") ? recur::SampleFormat::csv : recur::SampleFormat::json;
  recur::ValidationOptions opts;
  if (seed) {
    opts.jitter = true;
    opts.seed = *seed;
  }
  return recur::load_sample(path, fmt, opts);
}

// "lo:step:hi", step > 0, inclusive upper end.
std::vector<double> parse_h_grid(const std::string& text) {
  double lo = 0.0, step = 0.0, hi = 0.0;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &step, &hi, &extra) != 3) {
    throw recur::ConfigError("--h-grid expects lo:step:hi, got '" + text + "'");
  }
  if (!(step > 0.0) || !(lo > 0.0) || hi < lo) {
    throw recur::ConfigError("--h-grid needs 0 < lo <= hi and step > 0");
  }
  std::vector<double> grid;
  for (double h = lo; h <= hi + 1e-12; h += step) grid.push_back(h);
  return grid;
}

recur::DiscreteMeasure measure_from_json(const json& j) {
  recur::DiscreteMeasure w;
  w.atoms = j.at("support").get<std::vector<double>>();
  w.masses = j.at("masses").get<std::vector<double>>();
  return recur::DiscreteMeasure(w.atoms, w.masses);
}

std::vector<recur::DiscreteMeasure> load_lattice_file(const std::string& path) {
  const json j = json::parse(read_file(path));
  if (!j.is_array() || j.empty()) {
    throw recur::SchemaError("weight lattice file must be a nonempty array of measures");
  }
  std::vector<recur::DiscreteMeasure> out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(measure_from_json(item));
  return out;
}

// Candidate measures for data fits: the base measure with the masses at its
// last four atoms varied over {0.25, 0.5, 0.75, 1}, mirroring the default
// simulation lattice but on the data-driven atom grid.
std::vector<recur::DiscreteMeasure> lattice_from_base(const recur::DiscreteMeasure& base) {
  if (base.atoms.size() < 4) {
    throw recur::ConfigError("adaptive weights need a base measure with at least 4 atoms");
  }
  static const double levels[] = {0.25, 0.5, 0.75, 1.0};
  std::vector<recur::DiscreteMeasure> out;
  out.reserve(256);
  const std::size_t m = base.masses.size();
  for (double a : levels) {
    for (double b : levels) {
      for (double c : levels) {
        for (double d : levels) {
          recur::DiscreteMeasure w = base;
          w.masses[m - 4] = a;
          w.masses[m - 3] = b;
          w.masses[m - 2] = c;
          w.masses[m - 1] = d;
          out.push_back(w);
        }
      }
    }
  }
  return out;
}

json measure_to_json(const recur::DiscreteMeasure& w) {
  return json{{"support", w.atoms}, {"masses", w.masses}};
}

std::string format_fit_text(const recur::FitReport& r) {
  std::ostringstream os;
  os << "theta_hat:";
  for (double v : r.theta_hat) os << ' ' << v;
  os << "\nbandwidth: " << r.chosen_bandwidth;
  os << "\ncriterion: " << r.criterion_value;
  os << "\niterations: " << r.iterations;
  os << "\nconverged: " << (r.converged ? "yes" : "no");
  os << "\nweight support:";
  for (double v : r.chosen_measure.atoms) os << ' ' << v;
  os << "\nweight masses:";
  for (double v : r.chosen_measure.masses) os << ' ' << v;
  if (r.mse_estimate) os << "\nestimated mse: " << *r.mse_estimate;
  if (r.variance_matrix.size() > 0) {
    os << "\nvariance matrix:";
    for (Eigen::Index i = 0; i < r.variance_matrix.rows(); ++i) {
      os << "\n ";
      for (Eigen::Index j = 0; j < r.variance_matrix.cols(); ++j) {
        os << ' ' << r.variance_matrix(i, j);
      }
    }
  }
  os << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// fit

struct FitFlags {
  std::string model = "single-index";
  std::string mu0 = "linear";
  std::string kernel = "epanechnikov";
  std::string bandwidth = "0.2";
  std::string h_grid;
  std::string weights = "fixed";
  std::string lattice_file;
  std::string trim = "density";
  double trim_c = 0.0;
  std::string data;
  std::optional<std::uint64_t> seed;
  bool require_seed = false;
  std::size_t jobs = 1;
  std::string format = "json";
  std::string out;
};

recur::ParametricModel resolve_mu0(const std::string& flag, std::size_t d) {
  if (flag == "linear") return recur::linear_parametric_model(d);
  const json j = json::parse(read_file(flag));
  const std::string family = j.at("family").get<std::string>();
  if (family != "linear") {
    throw recur::ConfigError("unsupported mu0 family '" + family + "' (only: linear)");
  }
  return recur::linear_parametric_model(d, j.value("intercept", 0.0));
}

int cmd_fit(const FitFlags& f) {
  if (f.require_seed && !f.seed) throw recur::ConfigError("--require-seed set but no --seed given");
  const bool auto_h = f.bandwidth == "auto";
  double h = 0.0;
  if (!auto_h) {
    try {
      h = std::stod(f.bandwidth);
    } catch (const std::exception&) {
      throw recur::ConfigError("--bandwidth expects a number or 'auto'");
    }
    if (!(h > 0.0)) throw recur::ConfigError("--bandwidth must be positive");
  } else if (f.h_grid.empty()) {
    throw recur::ConfigError("--bandwidth auto requires --h-grid");
  }
  std::vector<double> grid;
  if (!f.h_grid.empty()) grid = parse_h_grid(f.h_grid);

  const recur::Sample sample = load_data(f.data, f.seed);
  const recur::DiscreteMeasure base_w = recur::equispaced_unit_measure(0.9 * sample.t_max(), 12);

  recur::TrimmingSpec trim;
  if (f.trim == "box") {
    trim.mode = recur::TrimmingSpec::Mode::preliminary_set;
  } else if (f.trim == "density") {
    trim.mode = recur::TrimmingSpec::Mode::density_threshold;
    trim.c = f.trim_c;
  } else {
    throw recur::ConfigError("--trim expects box or density");
  }

  const recur::ThetaDomain domain = recur::ThetaDomain::uniform(sample.d(), 0.0, 3.0);

  json resolved{{"subcommand", "fit"},
                {"model", f.model},
                {"kernel", f.kernel},
                {"bandwidth", auto_h ? json("auto") : json(h)},
                {"h_grid", grid},
                {"weights", f.weights},
                {"trim", f.trim},
                {"trim_c", f.trim_c},
                {"data", f.data},
                {"seed", f.seed ? json(*f.seed) : json()},
                {"jobs", f.jobs},
                {"format", f.format},
                {"out", f.out.empty() ? json() : json(f.out)},
                {"base_weight_measure", measure_to_json(base_w)},
                {"theta_box", json{{"lo", 0.0}, {"hi", 3.0}}}};
  if (f.model == "parametric") resolved["mu0"] = f.mu0;

  const recur::CensoringFit cens = recur::kaplan_meier_censoring(sample);
  recur::FitReport report;

  if (f.model == "parametric") {
    if (f.weights != "fixed") {
      throw recur::ConfigError("adaptive weights need --model single-index");
    }
    const recur::ParametricModel model = resolve_mu0(f.mu0, sample.d());
    std::cerr << resolved.dump(2) << '\n';
    report = recur::fit_parametric(model, base_w, sample, cens, domain);
  } else if (f.model == "single-index") {
    const recur::KernelFamily family = f.kernel == "biweight"
                                           ? recur::KernelFamily::biweight
                                           : recur::KernelFamily::epanechnikov;
    if (f.kernel != "epanechnikov" && f.kernel != "biweight") {
      throw recur::ConfigError("--kernel expects epanechnikov or biweight");
    }
    if (f.weights == "adaptive") {
      if (auto_h) {
        throw recur::ConfigError("adaptive weights and auto bandwidth cannot be combined");
      }
      const auto candidates = f.lattice_file.empty() ? lattice_from_base(base_w)
                                                     : load_lattice_file(f.lattice_file);
      resolved["lattice_candidates"] = candidates.size();
      std::cerr << resolved.dump(2) << '\n';
      const recur::KernelSpec spec{family, h};
      auto sel = recur::select_weight_measure(candidates, base_w, spec, sample, cens, domain, trim);
      report = sel.report;
    } else if (f.weights == "fixed") {
      std::cerr << resolved.dump(2) << '\n';
      if (auto_h) {
        report = recur::fit_joint_theta_h(family, grid, base_w, sample, cens, domain, trim);
      } else {
        const recur::KernelSpec spec{family, h};
        report = recur::fit_semiparametric(spec, base_w, sample, cens, domain, trim);
      }
      try {
        const recur::KernelSpec spec{family, report.chosen_bandwidth};
        const auto var = recur::variance_report(report.theta_hat, spec, report.chosen_measure,
                                                sample, cens);
        report.variance_matrix = var.v_hat;
        report.mse_estimate = var.mse_hat;
      } catch (const recur::SingularSigma& e) {
        std::cerr << "variance skipped: " << e.what() << '\n';
      }
    } else {
      throw recur::ConfigError("--weights expects fixed or adaptive");
    }
  } else {
    throw recur::ConfigError("--model expects parametric or single-index");
  }

  const std::string text =
      f.format == "text" ? format_fit_text(report) : recur::fit_report_to_json(report) + "\n";
  if (f.out.empty()) {
    std::cout << text;
  } else {
    const auto path = (std::filesystem::path(f.out) / "fit.json").string();
    write_atomic(path, recur::fit_report_to_json(report) + "\n");
    if (f.format == "text") std::cout << text;
    std::cerr << "wrote " << path << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateFlags {
  std::string config_file;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  bool require_seed = false;
  std::optional<std::size_t> jobs;
  std::string format = "json";
  std::string out = ".";
};

int cmd_simulate(const SimulateFlags& f) {
  recur::SimulationConfig config;
  if (!f.config_file.empty()) config = recur::config_from_json(read_file(f.config_file));
  if (f.reps) config.reps = *f.reps;
  if (f.n) config.n = *f.n;
  if (f.seed) config.seed = *f.seed;
  if (f.jobs) config.jobs = *f.jobs;
  if (f.require_seed && !f.seed) throw recur::ConfigError("--require-seed set but no --seed given");

  std::cerr << recur::config_to_json(config) << '\n' << "jobs: " << config.jobs << '\n';

  const recur::ReplicationStudy study = recur::run_replications(config);

  std::size_t mass_dim = config.base_w.masses.size();
  if (config.pipeline == recur::Pipeline::adaptive_w) {
    mass_dim = config.lattice.empty() ? recur::default_atom_grid().size()
                                      : config.lattice.front().masses.size();
  }
  const std::string csv = recur::records_to_csv(study.records, config.d() - 1, mass_dim);
  const std::string summary = recur::summary_to_json(config, study.summary);

  const std::filesystem::path dir(f.out);
  write_atomic((dir / "records.csv").string(), csv);
  write_atomic((dir / "summary.json").string(), summary + "\n");
  std::cerr << "wrote " << (dir / "records.csv").string() << " and "
            << (dir / "summary.json").string() << '\n';

  if (f.format == "text") {
    const auto& s = study.summary;
    std::cout << "reps used: " << s.reps_used << '/' << s.reps_total
              << " (failures " << s.failures << ")\n"
              << "mse: " << s.mse << '\n'
              << "mean events per subject: " << s.mean_events_per_subject << '\n'
              << "censoring fraction: " << s.censoring_fraction << '\n';
  } else {
    std::cout << summary << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce

struct ReproduceFlags {
  int table = 0;
  std::uint64_t seed = 42;
  bool seed_given = false;
  bool require_seed = false;
  std::size_t jobs = 1;
  std::string format = "text";
  std::string out;
};

int cmd_reproduce(const ReproduceFlags& f) {
  if (f.require_seed && !f.seed_given) {
    throw recur::ConfigError("--require-seed set but no --seed given");
  }
  if (f.table < 1 || f.table > 3) throw recur::ConfigError("--table expects 1, 2 or 3");

  for (const auto& config : recur::table_configs(f.table, f.seed, f.jobs)) {
    std::cerr << recur::config_to_json(config) << '\n';
  }
  std::cerr << "jobs: " << f.jobs << '\n';

  const recur::TableReproduction rep = recur::reproduce_table(f.table, f.seed, f.jobs);
  const std::string text = recur::comparison_to_text(rep);
  const std::string machine = recur::comparison_to_json(rep);

  std::cout << (f.format == "json" ? machine + "\n" : text);
  if (!f.out.empty()) {
    const std::filesystem::path dir(f.out);
    const std::string stem = "table" + std::to_string(f.table);
    write_atomic((dir / (stem + "_report.json")).string(), machine + "\n");
    write_atomic((dir / (stem + "_report.txt")).string(), text);
    std::cerr << "wrote " << (dir / (stem + "_report.json")).string() << " and "
              << (dir / (stem + "_report.txt")).string() << '\n';
  }
  return rep.all_pass ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional mean estimation for censored recurrent events"};
  app.require_subcommand(1);

  FitFlags ff;
  auto* fit = app.add_subcommand("fit", "Fit a model to a data file");
  fit->add_option("--model", ff.model, "parametric | single-index")->capture_default_str();
  fit->add_option("--mu0", ff.mu0, "linear | path to a model spec file")->capture_default_str();
  fit->add_option("--kernel", ff.kernel, "epanechnikov | biweight")->capture_default_str();
  fit->add_option("--bandwidth", ff.bandwidth, "number | auto")->capture_default_str();
  fit->add_option("--h-grid", ff.h_grid, "bandwidth grid lo:step:hi");
  fit->add_option("--weights", ff.weights, "fixed | adaptive")->capture_default_str();
  fit->add_option("--weight-lattice", ff.lattice_file, "JSON file with candidate measures");
  fit->add_option("--trim", ff.trim, "box | density")->capture_default_str();
  fit->add_option("--trim-c", ff.trim_c, "density threshold (0 = quantile rule)")
      ->capture_default_str();
  fit->add_option("--data", ff.data, "sample file (.json or .csv)")->required();
  fit->add_option("--seed", ff.seed, "seed for tie-breaking jitter");
  fit->add_flag("--require-seed", ff.require_seed, "fail unless --seed is given");
  fit->add_option("--jobs", ff.jobs, "worker count")->capture_default_str();
  fit->add_option("--format", ff.format, "json | text")->capture_default_str();
  fit->add_option("--out", ff.out, "output directory (default: stdout only)");

  SimulateFlags sf;
  auto* sim = app.add_subcommand("simulate", "Run a replication study");
  sim->add_option("--config", sf.config_file, "JSON study configuration");
  sim->add_option("--reps", sf.reps, "replication count override");
  sim->add_option("--n", sf.n, "sample size override");
  sim->add_option("--seed", sf.seed, "master seed override");
  sim->add_flag("--require-seed", sf.require_seed, "fail unless --seed is given");
  sim->add_option("--jobs", sf.jobs, "worker count override");
  sim->add_option("--format", sf.format, "json | text")->capture_default_str();
  sim->add_option("--out", sf.out, "output directory")->capture_default_str();

  ReproduceFlags rf;
  auto* rep = app.add_subcommand("reproduce", "Reproduce a reference table");
  rep->add_option("--table", rf.table, "table id (1, 2 or 3)")->required();
  auto* seed_opt = rep->add_option("--seed", rf.seed, "master seed")->capture_default_str();
  rep->add_flag("--require-seed", rf.require_seed, "fail unless --seed is given");
  rep->add_option("--jobs", rf.jobs, "worker count")->capture_default_str();
  rep->add_option("--format", rf.format, "text | json")->capture_default_str();
  rep->add_option("--out", rf.out, "output directory for report files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitData;
  }
  rf.seed_given = seed_opt->count() > 0;

  try {
    if (fit->parsed()) return cmd_fit(ff);
    if (sim->parsed()) return cmd_simulate(sf);
    return cmd_reproduce(rf);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return classify(e);
  }
}
