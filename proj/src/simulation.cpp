#include "recur/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>
#include <utility>

#include "json.hpp"
#include "recur/errors.hpp"
#include "recur/inference.hpp"
#include "recur/reference.hpp"
#include "recur/survival.hpp"

namespace recur {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void check_config(const SimulationConfig& c) {
  if (c.n < 2) throw ConfigError("need at least two subjects per replication");
  if (c.reps < 1) throw ConfigError("need at least one replication");
  if (c.theta0.empty() || c.theta0[0] != 1.0) {
    throw ConfigError("theta0 must be nonempty with first component 1");
  }
  if (!(c.z_lo < c.z_hi)) throw ConfigError("covariate range must be nonempty");
  if (!(c.death.shape > 0.0 && c.death.scale > 0.0 && c.censoring.shape > 0.0 &&
        c.censoring.scale > 0.0)) {
    throw ConfigError("distribution parameters must be positive");
  }
  if (c.pipeline == Pipeline::adaptive_h && c.h_grid.empty()) {
    throw ConfigError("adaptive bandwidth pipeline needs a bandwidth grid");
  }
}

RepRecord run_one(const SimulationConfig& config, std::size_t rep) {
  RepRecord rec;
  rec.rep = rep;
  try {
    const Sample sample = generate_sample(config, rep);
    for (const Subject& s : sample.subjects) {
      rec.events_total += s.events.size();
      if (!s.delta) ++rec.censored_count;
    }

    const CensoringFit fit = kaplan_meier_censoring(sample);
    FitReport report;
    switch (config.pipeline) {
      case Pipeline::fixed_w:
        report = fit_semiparametric(config.kernel, config.base_w, sample, fit, config.domain,
                                    config.trim, config.optimizer, config.leave_one_out);
        rec.chosen_masses = config.base_w.masses;
        break;
      case Pipeline::adaptive_w: {
        const std::vector<DiscreteMeasure>& lattice =
            config.lattice.empty() ? default_weight_lattice() : config.lattice;
        WeightSelection sel =
            select_weight_measure(lattice, config.base_w, config.kernel, sample, fit,
                                  config.domain, config.trim, config.optimizer,
                                  config.leave_one_out);
        report = std::move(sel.report);
        rec.chosen_masses = sel.chosen.masses;
        rec.mse_hat = report.mse_estimate.value_or(0.0);
        break;
      }
      case Pipeline::adaptive_h:
        report = fit_joint_theta_h(config.kernel.family, config.h_grid, config.base_w, sample,
                                   fit, config.domain, config.trim, config.optimizer,
                                   config.leave_one_out);
        rec.chosen_masses = config.base_w.masses;
        break;
    }
    rec.theta_free = report.free_components();
    rec.bandwidth = report.chosen_bandwidth;
    rec.criterion = report.criterion_value;
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

json measure_to_json(const DiscreteMeasure& w) {
  return json{{"support", w.atoms}, {"masses", w.masses}};
}

DiscreteMeasure measure_from_json(const json& j) {
  if (!j.is_object() || !j.contains("support") || !j.contains("masses")) {
    throw SchemaError("measure must be an object with support and masses");
  }
  return DiscreteMeasure(j["support"].get<std::vector<double>>(),
                         j["masses"].get<std::vector<double>>());
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool found = false;
    for (const char* k : known) {
      if (it.key() == k) {
        found = true;
        break;
      }
    }
    if (!found) throw SchemaError("unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace

std::vector<double> default_atom_grid() {
  std::vector<double> atoms(12);
  for (std::size_t k = 0; k < atoms.size(); ++k) atoms[k] = 0.1 * static_cast<double>(k + 1);
  return atoms;
}

DiscreteMeasure all_ones_measure() {
  std::vector<double> atoms = default_atom_grid();
  return DiscreteMeasure(std::move(atoms), std::vector<double>(12, 1.0));
}

std::vector<DiscreteMeasure> default_weight_lattice() {
  const std::vector<double> atoms = default_atom_grid();
  const std::array<double, 4> choices = {0.25, 0.5, 0.75, 1.0};
  std::vector<DiscreteMeasure> lattice;
  lattice.reserve(256);
  for (double a : choices) {
    for (double b : choices) {
      for (double c : choices) {
        for (double d : choices) {
          std::vector<double> masses(12, 1.0);
          masses[8] = a;
          masses[9] = b;
          masses[10] = c;
          masses[11] = d;
          lattice.emplace_back(atoms, std::move(masses));
        }
      }
    }
  }
  return lattice;
}

GeneratedSubject generate_subject(const SimulationConfig& config, RngStream& rng) {
  const std::size_t d = config.d();
  GeneratedSubject g;
  g.subject.Z.resize(d);
  for (std::size_t k = 0; k < d; ++k) g.subject.Z[k] = rng.uniform(config.z_lo, config.z_hi);
  g.death_time = rng.weibull(config.death.shape, config.death.scale);
  g.censor_time = rng.weibull(config.censoring.shape, config.censoring.scale);
  g.subject.T = std::min(g.death_time, g.censor_time);
  g.subject.delta = g.death_time <= g.censor_time;

  double intensity = config.intercept;
  for (std::size_t k = 0; k < d; ++k) intensity += config.theta0[k] * g.subject.Z[k];
  const long count = rng.poisson(intensity * g.subject.T);
  g.subject.events.resize(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    g.subject.events[static_cast<std::size_t>(k)] = g.subject.T * rng.uniform_pos();
  }
  std::sort(g.subject.events.begin(), g.subject.events.end());
  return g;
}

Sample generate_sample(const SimulationConfig& config, std::uint64_t rep) {
  Sample raw;
  raw.subjects.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    RngStream rng(stream_key(config.seed, rep, i));
    raw.subjects.push_back(generate_subject(config, rng).subject);
  }
  return validate_sample(raw);
}

bool failures_excessive(std::size_t failures, std::size_t reps) {
  return failures * 20 > reps;
}

ReplicationStudy run_replications(const SimulationConfig& config) {
  check_config(config);
  ReplicationStudy study;
  study.records.assign(config.reps, RepRecord{});

  const std::size_t jobs = std::max<std::size_t>(1, config.jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= config.reps) return;
      study.records[r] = run_one(config, r);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  const std::size_t p = config.d() - 1;
  ReplicationSummary& s = study.summary;
  s.reps_total = config.reps;
  s.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  s.variance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));

  std::vector<const RepRecord*> used;
  for (const RepRecord& r : study.records) {
    if (r.ok) used.push_back(&r);
  }
  s.reps_used = used.size();
  s.failures = config.reps - used.size();
  if (failures_excessive(s.failures, config.reps)) {
    throw ExcessiveFailures(std::to_string(s.failures) + " of " + std::to_string(config.reps) +
                            " replications failed");
  }

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (const RepRecord* r : used) {
    for (std::size_t c = 0; c < p; ++c) mean[static_cast<Eigen::Index>(c)] += r->theta_free[c];
  }
  mean /= static_cast<double>(used.size());

  double mse = 0.0;
  std::size_t events = 0, censored = 0;
  std::vector<double> mass_mean;
  for (const RepRecord* r : used) {
    Eigen::VectorXd th(static_cast<Eigen::Index>(p));
    for (std::size_t c = 0; c < p; ++c) th[static_cast<Eigen::Index>(c)] = r->theta_free[c];
    Eigen::VectorXd centered = th - mean;
    s.variance += centered * centered.transpose();
    for (std::size_t c = 0; c < p; ++c) {
      const double dev = r->theta_free[c] - config.theta0[c + 1];
      mse += dev * dev;
    }
    events += r->events_total;
    censored += r->censored_count;
    if (mass_mean.size() < r->chosen_masses.size()) {
      mass_mean.resize(r->chosen_masses.size(), 0.0);
    }
    for (std::size_t k = 0; k < r->chosen_masses.size(); ++k) {
      mass_mean[k] += r->chosen_masses[k];
    }
  }
  s.variance /= static_cast<double>(used.size());
  s.mse = mse / static_cast<double>(used.size());
  for (std::size_t c = 0; c < p; ++c) {
    s.bias[static_cast<Eigen::Index>(c)] = mean[static_cast<Eigen::Index>(c)] -
                                           config.theta0[c + 1];
  }
  for (double& m : mass_mean) m /= static_cast<double>(used.size());
  s.mean_selected_masses = std::move(mass_mean);
  s.mean_events_per_subject =
      static_cast<double>(events) / static_cast<double>(used.size() * config.n);
  s.censoring_fraction =
      static_cast<double>(censored) / static_cast<double>(used.size() * config.n);
  return study;
}

std::string records_to_csv(const std::vector<RepRecord>& records, std::size_t free_dim,
                           std::size_t mass_dim) {
  std::ostringstream os;
  os << "rep,ok,error";
  for (std::size_t c = 1; c <= free_dim; ++c) os << ",theta_free_" << c;
  os << ",bandwidth,criterion,mse_hat,events,censored";
  for (std::size_t k = 1; k <= mass_dim; ++k) os << ",mass_" << k;
  os << '\n';
  for (const RepRecord& r : records) {
    std::string err = r.error;
    std::string quoted = "\"";
    for (char ch : err) {
      if (ch == '"') quoted += "\"\"";
      else quoted += ch;
    }
    quoted += '"';
    os << r.rep << ',' << (r.ok ? 1 : 0) << ',' << quoted;
    for (std::size_t c = 0; c < free_dim; ++c) {
      os << ',' << (c < r.theta_free.size() ? fmt17(r.theta_free[c]) : "");
    }
    os << ',' << fmt17(r.bandwidth) << ',' << fmt17(r.criterion) << ',' << fmt17(r.mse_hat)
       << ',' << r.events_total << ',' << r.censored_count;
    for (std::size_t k = 0; k < mass_dim; ++k) {
      os << ',' << (k < r.chosen_masses.size() ? fmt17(r.chosen_masses[k]) : "");
    }
    os << '\n';
  }
  return os.str();
}

std::string config_to_json(const SimulationConfig& c) {
  json j;
  j["n"] = c.n;
  j["reps"] = c.reps;
  j["theta0"] = c.theta0;
  j["intercept"] = c.intercept;
  j["z_range"] = {c.z_lo, c.z_hi};
  j["death"] = {{"shape", c.death.shape}, {"scale", c.death.scale}};
  j["censoring"] = {{"shape", c.censoring.shape}, {"scale", c.censoring.scale}};
  j["pipeline"] = c.pipeline == Pipeline::fixed_w     ? "fixed_w"
                  : c.pipeline == Pipeline::adaptive_w ? "adaptive_w"
                                                       : "adaptive_h";
  j["kernel"] = {{"family", c.kernel.family == KernelFamily::epanechnikov ? "epanechnikov"
                                                                          : "biweight"},
                 {"h", c.kernel.h}};
  if (!c.h_grid.empty()) j["h_grid"] = c.h_grid;
  j["base_measure"] = measure_to_json(c.base_w);
  if (!c.lattice.empty()) {
    j["lattice"] = json::array();
    for (const DiscreteMeasure& w : c.lattice) j["lattice"].push_back(measure_to_json(w));
  }
  {
    json dom = json::array();
    for (const auto& b : c.domain.free_bounds) dom.push_back({b.first, b.second});
    j["domain"] = dom;
  }
  j["trim"] = {{"mode", c.trim.mode == TrimmingSpec::Mode::preliminary_set ? "box" : "density"},
               {"c", c.trim.c}};
  j["optimizer"] = {{"max_iterations", c.optimizer.max_iterations},
                    {"multistarts", c.optimizer.multistarts}};
  j["leave_one_out"] = c.leave_one_out;
  j["seed"] = c.seed;
  // The worker count is an execution detail, not part of the study identity:
  // leaving it out keeps serialized outputs byte-identical across --jobs.
  return j.dump(2);
}

SimulationConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  reject_unknown_keys(j,
                      {"n", "reps", "theta0", "intercept", "z_range", "death", "censoring",
                       "pipeline", "kernel", "h_grid", "base_measure", "lattice", "domain",
                       "trim", "optimizer", "leave_one_out", "seed", "jobs"},
                      "config");
  SimulationConfig c;
  try {
    if (j.contains("n")) c.n = j["n"].get<std::size_t>();
    if (j.contains("reps")) c.reps = j["reps"].get<std::size_t>();
    if (j.contains("theta0")) c.theta0 = j["theta0"].get<std::vector<double>>();
    if (j.contains("intercept")) c.intercept = j["intercept"].get<double>();
    if (j.contains("z_range")) {
      auto r = j["z_range"].get<std::vector<double>>();
      if (r.size() != 2) throw SchemaError("z_range must have two entries");
      c.z_lo = r[0];
      c.z_hi = r[1];
    }
    if (j.contains("death")) {
      c.death.shape = j["death"].at("shape").get<double>();
      c.death.scale = j["death"].at("scale").get<double>();
    }
    if (j.contains("censoring")) {
      c.censoring.shape = j["censoring"].at("shape").get<double>();
      c.censoring.scale = j["censoring"].at("scale").get<double>();
    }
    if (j.contains("pipeline")) {
      const std::string p = j["pipeline"].get<std::string>();
      if (p == "fixed_w") c.pipeline = Pipeline::fixed_w;
      else if (p == "adaptive_w") c.pipeline = Pipeline::adaptive_w;
      else if (p == "adaptive_h") c.pipeline = Pipeline::adaptive_h;
      else throw SchemaError("pipeline must be fixed_w, adaptive_w, or adaptive_h");
    }
    if (j.contains("kernel")) {
      const std::string fam = j["kernel"].at("family").get<std::string>();
      if (fam == "epanechnikov") c.kernel.family = KernelFamily::epanechnikov;
      else if (fam == "biweight") c.kernel.family = KernelFamily::biweight;
      else throw SchemaError("kernel family must be epanechnikov or biweight");
      c.kernel.h = j["kernel"].at("h").get<double>();
    }
    if (j.contains("h_grid")) c.h_grid = j["h_grid"].get<std::vector<double>>();
    if (j.contains("base_measure")) c.base_w = measure_from_json(j["base_measure"]);
    if (j.contains("lattice")) {
      for (const json& w : j["lattice"]) c.lattice.push_back(measure_from_json(w));
    }
    if (j.contains("domain")) {
      c.domain.free_bounds.clear();
      for (const json& b : j["domain"]) {
        auto pair = b.get<std::vector<double>>();
        if (pair.size() != 2) throw SchemaError("domain bounds must be pairs");
        c.domain.free_bounds.emplace_back(pair[0], pair[1]);
      }
    } else {
      c.domain = ThetaDomain::uniform(c.theta0.size(), 0.0, 3.0);
    }
    if (j.contains("trim")) {
      const std::string mode = j["trim"].at("mode").get<std::string>();
      if (mode == "box") c.trim.mode = TrimmingSpec::Mode::preliminary_set;
      else if (mode == "density") c.trim.mode = TrimmingSpec::Mode::density_threshold;
      else throw SchemaError("trim mode must be box or density");
      if (j["trim"].contains("c")) c.trim.c = j["trim"]["c"].get<double>();
    }
    if (j.contains("optimizer")) {
      if (j["optimizer"].contains("max_iterations")) {
        c.optimizer.max_iterations = j["optimizer"]["max_iterations"].get<int>();
      }
      if (j["optimizer"].contains("multistarts")) {
        c.optimizer.multistarts = j["optimizer"]["multistarts"].get<int>();
      }
    }
    if (j.contains("leave_one_out")) c.leave_one_out = j["leave_one_out"].get<bool>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  if (c.domain.free_bounds.size() + 1 != c.theta0.size()) {
    c.domain = ThetaDomain::uniform(c.theta0.size(), 0.0, 3.0);
  }

  if (c.n == 0) throw ConfigError("config: n must be at least 1");
  if (c.reps == 0) throw ConfigError("config: reps must be at least 1");
  if (c.jobs == 0) throw ConfigError("config: jobs must be at least 1");
  if (c.theta0.empty()) throw ConfigError("config: theta0 must not be empty");
  if (c.theta0[0] != 1.0) throw ConfigError("config: first component of theta0 is pinned to 1");
  if (c.z_hi < c.z_lo) throw ConfigError("config: z_range must be ordered");
  if (c.death.shape <= 0.0 || c.death.scale <= 0.0 || c.censoring.shape <= 0.0 ||
      c.censoring.scale <= 0.0) {
    throw ConfigError("config: Weibull shape and scale must be positive");
  }
  if (c.kernel.h <= 0.0) throw ConfigError("config: bandwidth must be positive");
  if (c.pipeline == Pipeline::adaptive_h) {
    if (c.h_grid.empty()) throw ConfigError("config: adaptive_h needs a bandwidth grid");
    for (double h : c.h_grid) {
      if (h <= 0.0) throw ConfigError("config: bandwidth grid entries must be positive");
    }
  }
  if (c.optimizer.max_iterations < 1 || c.optimizer.multistarts < 1) {
    throw ConfigError("config: optimizer iteration and start counts must be at least 1");
  }
  // The Poisson intensity theta0'z + intercept must stay nonnegative over the
  // covariate box, checked at the worst corner per component.
  double lowest = c.intercept;
  for (double t : c.theta0) lowest += t * (t >= 0.0 ? c.z_lo : c.z_hi);
  if (lowest < 0.0) {
    throw ConfigError("config: intensity goes negative on the covariate range");
  }
  return c;
}

std::string summary_to_json(const SimulationConfig& config, const ReplicationSummary& s) {
  json j;
  j["config"] = json::parse(config_to_json(config));
  j["reps_total"] = s.reps_total;
  j["reps_used"] = s.reps_used;
  j["failures"] = s.failures;
  std::vector<double> bias(s.bias.data(), s.bias.data() + s.bias.size());
  j["bias"] = bias;
  json var = json::array();
  for (Eigen::Index r = 0; r < s.variance.rows(); ++r) {
    std::vector<double> row(s.variance.cols());
    for (Eigen::Index c = 0; c < s.variance.cols(); ++c) {
      row[static_cast<std::size_t>(c)] = s.variance(r, c);
    }
    var.push_back(row);
  }
  j["variance"] = var;
  j["mse"] = s.mse;
  j["mean_selected_masses"] = s.mean_selected_masses;
  j["mean_events_per_subject"] = s.mean_events_per_subject;
  j["censoring_fraction"] = s.censoring_fraction;
  return j.dump(2);
}

std::vector<SimulationConfig> table_configs(int table_id, std::uint64_t seed, std::size_t jobs) {
  auto base = [&](double censor_scale, Pipeline pipe) {
    SimulationConfig c;
    c.censoring.scale = censor_scale;
    c.pipeline = pipe;
    c.seed = seed;
    c.jobs = jobs;
    if (pipe == Pipeline::adaptive_h) {
      c.h_grid = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
    }
    return c;
  };
  switch (table_id) {
    case 1:
      return {base(reference::censoring_scale_30, Pipeline::fixed_w),
              base(reference::censoring_scale_30, Pipeline::adaptive_w)};
    case 2:
      return {base(reference::censoring_scale_50, Pipeline::fixed_w),
              base(reference::censoring_scale_50, Pipeline::adaptive_w)};
    case 3:
      return {base(reference::censoring_scale_30, Pipeline::adaptive_h),
              base(reference::censoring_scale_50, Pipeline::adaptive_h)};
    default:
      throw ConfigError("table id must be 1, 2, or 3");
  }
}

namespace {

ComparisonRow band_row(const std::string& label, double ref, double produced,
                       reference::Band band) {
  std::ostringstream tol;
  tol << "[" << band.lo << ", " << band.hi << "]";
  return {label, ref, produced, tol.str(), band.contains(produced), false};
}

ComparisonRow info_row(const std::string& label, double ref, double produced) {
  return {label, ref, produced, "info", true, true};
}

void mass_rows(std::vector<ComparisonRow>& rows, const std::string& prefix,
               const ReplicationSummary& s, const std::array<double, 4>& ref) {
  static const char* points[4] = {"0.9", "1.0", "1.1", "1.2"};
  const std::size_t base = s.mean_selected_masses.size() - 4;
  bool nonincreasing = true;
  for (std::size_t k = 0; k < 4; ++k) {
    const double got = s.mean_selected_masses[base + k];
    std::ostringstream tol;
    tol << "+/- " << reference::mean_mass_tolerance;
    rows.push_back({prefix + " mean mass at " + points[k], ref[k], got, tol.str(),
                    std::abs(got - ref[k]) <= reference::mean_mass_tolerance, false});
    if (k > 0 && got > s.mean_selected_masses[base + k - 1]) nonincreasing = false;
  }
  rows.push_back({prefix + " mean masses nonincreasing", 1.0, nonincreasing ? 1.0 : 0.0,
                  "== 1", nonincreasing, false});
}

}  // namespace

TableReproduction reproduce_table(int table_id, std::uint64_t seed, std::size_t jobs) {
  TableReproduction rep;
  rep.table_id = table_id;
  const std::vector<SimulationConfig> configs = table_configs(table_id, seed, jobs);
  for (const SimulationConfig& c : configs) rep.studies.push_back(run_replications(c));

  namespace ref = recur::reference;
  std::vector<ComparisonRow>& rows = rep.rows;
  if (table_id == 1 || table_id == 2) {
    const ReplicationSummary& fixed = rep.studies[0].summary;
    const ReplicationSummary& adaptive = rep.studies[1].summary;
    const bool t1 = table_id == 1;
    rows.push_back(band_row("fixed-measure mse", t1 ? ref::table1_fixed_mse : ref::table2_fixed_mse,
                            fixed.mse,
                            t1 ? ref::table1_fixed_mse_band : ref::table2_fixed_mse_band));
    rows.push_back(band_row("adaptive-measure mse",
                            t1 ? ref::table1_adaptive_mse : ref::table2_adaptive_mse,
                            adaptive.mse,
                            t1 ? ref::table1_adaptive_mse_band : ref::table2_adaptive_mse_band));
    rows.push_back({"adaptive mse below fixed mse", 1.0,
                    adaptive.mse < fixed.mse ? 1.0 : 0.0, "== 1", adaptive.mse < fixed.mse,
                    false});
    mass_rows(rows, "adaptive", adaptive, t1 ? ref::mean_masses_30 : ref::mean_masses_50);
    if (t1) {
      double bias_norm_ref = 0.0;
      for (double b : ref::table1_fixed_bias) bias_norm_ref += b * b;
      rows.push_back(info_row("fixed-measure bias norm", std::sqrt(bias_norm_ref),
                              fixed.bias.norm()));
    } else {
      rows.push_back(info_row("fixed-measure bias norm", 0.0, fixed.bias.norm()));
    }
  } else {
    rows.push_back(band_row("adaptive-bandwidth mse, lighter censoring", ref::table3_mse_30,
                            rep.studies[0].summary.mse, ref::table3_mse_30_band));
    rows.push_back(band_row("adaptive-bandwidth mse, heavier censoring", ref::table3_mse_50,
                            rep.studies[1].summary.mse, ref::table3_mse_50_band));
  }

  rep.all_pass = true;
  for (const ComparisonRow& r : rows) {
    if (!r.informational && !r.pass) rep.all_pass = false;
  }
  return rep;
}

std::string comparison_to_text(const TableReproduction& rep) {
  std::ostringstream os;
  os << "table " << rep.table_id << " reproduction\n";
  os << "  " << std::left;
  char line[160];
  std::snprintf(line, sizeof(line), "%-42s %12s %12s %14s %s", "quantity", "reference",
                "produced", "tolerance", "status");
  os << line << '\n';
  for (const ComparisonRow& r : rep.rows) {
    std::snprintf(line, sizeof(line), "  %-42s %12.4f %12.4f %14s %s", r.label.c_str(),
                  r.reference, r.produced, r.tolerance.c_str(),
                  r.informational ? "info" : (r.pass ? "pass" : "FAIL"));
    os << line << '\n';
  }
  os << (rep.all_pass ? "overall: pass" : "overall: FAIL") << '\n';
  return os.str();
}

std::string comparison_to_json(const TableReproduction& rep) {
  json j;
  j["table"] = rep.table_id;
  j["all_pass"] = rep.all_pass;
  j["rows"] = json::array();
  for (const ComparisonRow& r : rep.rows) {
    j["rows"].push_back({{"label", r.label},
                         {"reference", r.reference},
                         {"produced", r.produced},
                         {"tolerance", r.tolerance},
                         {"pass", r.pass},
                         {"informational", r.informational}});
  }
  j["studies"] = json::array();
  for (const ReplicationStudy& s : rep.studies) {
    std::vector<double> bias(s.summary.bias.data(), s.summary.bias.data() + s.summary.bias.size());
    j["studies"].push_back({{"mse", s.summary.mse},
                            {"bias", bias},
                            {"mean_selected_masses", s.summary.mean_selected_masses},
                            {"censoring_fraction", s.summary.censoring_fraction},
                            {"mean_events_per_subject", s.summary.mean_events_per_subject},
                            {"reps_used", s.summary.reps_used},
                            {"failures", s.summary.failures}});
  }
  return j.dump(2);
}

}  // namespace recur
