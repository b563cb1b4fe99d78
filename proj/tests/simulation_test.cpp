#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "recur/errors.hpp"
#include "recur/rng.hpp"
#include "recur/simulation.hpp"

using namespace recur;

namespace {

SimulationConfig small_config() {
  SimulationConfig c;
  c.n = 50;
  c.reps = 4;
  c.seed = 99;
  return c;
}

}  // namespace

TEST_CASE("latent bookkeeping holds for every generated subject") {
  SimulationConfig c;
  for (std::size_t i = 0; i < 1000; ++i) {
    RngStream rng(stream_key(5, 0, i));
    const GeneratedSubject g = generate_subject(c, rng);
    CHECK(g.subject.delta == (g.death_time <= g.censor_time));
    CHECK(g.subject.T == std::min(g.death_time, g.censor_time));
    for (double e : g.subject.events) {
      CHECK(e > 0.0);
      CHECK(e <= g.subject.T);
    }
    REQUIRE(g.subject.Z.size() == 4);
    for (double z : g.subject.Z) {
      CHECK(z >= 1.0);
      CHECK(z < 2.0);
    }
  }
}

TEST_CASE("zero intensity produces no events") {
  SimulationConfig c;
  c.theta0 = {1.0};
  c.z_lo = 1.0;
  c.z_hi = 1.0 + 1e-12;  // effectively constant covariate
  c.intercept = -1.0;    // cancels theta'Z exactly at the boundary
  for (std::size_t i = 0; i < 200; ++i) {
    RngStream rng(stream_key(6, 0, i));
    const GeneratedSubject g = generate_subject(c, rng);
    CHECK(g.subject.events.empty());
  }
}

TEST_CASE("pushing the censoring scale out disables censoring") {
  SimulationConfig c;
  c.censoring.scale = 1e6;
  std::size_t censored = 0;
  for (std::size_t i = 0; i < 2000; ++i) {
    RngStream rng(stream_key(7, 0, i));
    censored += generate_subject(c, rng).subject.delta ? 0 : 1;
  }
  CHECK(censored == 0);
}

TEST_CASE("censoring fractions under the two study scales") {
  // Frozen pre-build calibration of the (shape, scale) reading: about 28%
  // censored at scale 1.38 and about 67% at scale 1.0.
  for (auto [scale, expected] : {std::pair{1.38, 0.2844}, std::pair{1.0, 0.6732}}) {
    SimulationConfig c;
    c.censoring.scale = scale;
    double censored = 0.0;
    const std::size_t m = 10000;
    for (std::size_t i = 0; i < m; ++i) {
      RngStream rng(stream_key(8, 0, i));
      censored += generate_subject(c, rng).subject.delta ? 0.0 : 1.0;
    }
    CHECK(std::abs(censored / double(m) - expected) < 0.015);
  }
}

TEST_CASE("mean observed events per subject under the two study scales") {
  // Frozen pre-build calibration: about 11.5 events per subject at 28%
  // censoring and about 10.0 at 67%.
  for (auto [scale, expected] : {std::pair{1.38, 11.47}, std::pair{1.0, 10.01}}) {
    SimulationConfig c;
    c.censoring.scale = scale;
    double events = 0.0;
    const std::size_t m = 10000;
    for (std::size_t i = 0; i < m; ++i) {
      RngStream rng(stream_key(9, 0, i));
      events += double(generate_subject(c, rng).subject.events.size());
    }
    CHECK(std::abs(events / double(m) - expected) < 0.4);
  }
}

TEST_CASE("per-subject event rate recovers the intensity") {
  SimulationConfig c;
  c.censoring.scale = 1e6;
  const double t = 1.0;
  double rate_sum = 0.0, intensity_sum = 0.0;
  const std::size_t m = 10000;
  for (std::size_t i = 0; i < m; ++i) {
    RngStream rng(stream_key(10, 0, i));
    const GeneratedSubject g = generate_subject(c, rng);
    const double horizon = std::min(g.subject.T, t);
    const double count =
        double(std::upper_bound(g.subject.events.begin(), g.subject.events.end(), horizon) -
               g.subject.events.begin());
    rate_sum += count / horizon;
    double index = c.intercept;
    for (std::size_t k = 0; k < 4; ++k) index += c.theta0[k] * g.subject.Z[k];
    intensity_sum += index;
  }
  CHECK(std::abs(rate_sum / intensity_sum - 1.0) < 0.05);
}

TEST_CASE("samples regenerate identically per replication") {
  SimulationConfig c = small_config();
  const Sample a = generate_sample(c, 3);
  const Sample b = generate_sample(c, 3);
  REQUIRE(a.n() == b.n());
  for (std::size_t i = 0; i < a.n(); ++i) {
    CHECK(a.subjects[i].T == b.subjects[i].T);
    CHECK(a.subjects[i].Z == b.subjects[i].Z);
    CHECK(a.subjects[i].events == b.subjects[i].events);
  }
  // Subjects arrive in canonical follow-up order.
  for (std::size_t i = 1; i < a.n(); ++i) CHECK(a.subjects[i - 1].T < a.subjects[i].T);
  // Different replications differ.
  const Sample other = generate_sample(c, 4);
  CHECK(a.subjects[0].T != other.subjects[0].T);
}

TEST_CASE("default weight lattice enumerates the full mass grid") {
  const std::vector<DiscreteMeasure> lattice = default_weight_lattice();
  REQUIRE(lattice.size() == 256);
  std::set<std::vector<double>> tails;
  for (const DiscreteMeasure& w : lattice) {
    REQUIRE(w.atoms.size() == 12);
    for (std::size_t k = 0; k < 8; ++k) CHECK(w.masses[k] == 1.0);
    std::vector<double> tail(w.masses.begin() + 8, w.masses.end());
    for (double m : tail) CHECK((m == 0.25 || m == 0.5 || m == 0.75 || m == 1.0));
    tails.insert(tail);
  }
  CHECK(tails.size() == 256);
  // Canonical enumeration order: earlier tail points vary slowest,
  // ascending within each position.
  CHECK(lattice.front().masses[8] == 0.25);
  CHECK(lattice.front().masses[11] == 0.25);
  CHECK(lattice.back().masses[8] == 1.0);
  CHECK(lattice.back().masses[11] == 1.0);
  CHECK(lattice[1].masses[11] == 0.5);
  CHECK(lattice[1].masses[8] == 0.25);
}

TEST_CASE("single replication summarizes to an exact bias and zero variance") {
  SimulationConfig c = small_config();
  c.reps = 1;
  const ReplicationStudy study = run_replications(c);
  REQUIRE(study.summary.reps_used == 1);
  REQUIRE(study.records.size() == 1);
  const RepRecord& r = study.records[0];
  REQUIRE(r.ok);
  for (int k = 0; k < 3; ++k) {
    CHECK(study.summary.bias(k) ==
          doctest::Approx(r.theta_free[std::size_t(k)] - c.theta0[std::size_t(k) + 1])
              .epsilon(1e-15));
  }
  CHECK(study.summary.variance.norm() == 0.0);
}

TEST_CASE("summary obeys the bias-variance decomposition identity") {
  const ReplicationStudy study = run_replications(small_config());
  const ReplicationSummary& s = study.summary;
  const double recomposed = s.bias.squaredNorm() + s.variance.trace();
  CHECK(std::abs(s.mse - recomposed) < 1e-10);
  CHECK(s.reps_total == 4);
  CHECK(s.mean_events_per_subject > 5.0);
  CHECK(s.censoring_fraction > 0.05);
  CHECK(s.censoring_fraction < 0.6);
}

TEST_CASE("replication records are byte-identical across worker counts") {
  SimulationConfig c = small_config();
  c.reps = 6;
  c.jobs = 1;
  const ReplicationStudy a = run_replications(c);
  c.jobs = 3;
  const ReplicationStudy b = run_replications(c);
  CHECK(records_to_csv(a.records, 3, 12) == records_to_csv(b.records, 3, 12));
  CHECK(summary_to_json(c, a.summary) == summary_to_json(c, b.summary));
}

TEST_CASE("excessive replication failures abort the study") {
  SimulationConfig c;
  c.n = 10;
  c.reps = 4;
  c.seed = 1;
  c.kernel.h = 1e-7;  // empties every leave-one-out window
  CHECK_THROWS_AS(run_replications(c), ExcessiveFailures);
  CHECK(failures_excessive(1, 4));
  CHECK_FALSE(failures_excessive(0, 4));
  CHECK_FALSE(failures_excessive(5, 100));
  CHECK(failures_excessive(6, 100));
}

TEST_CASE("configuration json round-trips") {
  SimulationConfig c = small_config();
  c.pipeline = Pipeline::adaptive_h;
  c.h_grid = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  c.trim.mode = TrimmingSpec::Mode::preliminary_set;
  c.optimizer.multistarts = 3;
  c.leave_one_out = false;
  const SimulationConfig back = config_from_json(config_to_json(c));
  CHECK(back.n == c.n);
  CHECK(back.reps == c.reps);
  CHECK(back.theta0 == c.theta0);
  CHECK(back.intercept == c.intercept);
  CHECK(back.death.scale == c.death.scale);
  CHECK(back.censoring.scale == c.censoring.scale);
  CHECK(back.pipeline == c.pipeline);
  CHECK(back.h_grid == c.h_grid);
  CHECK(back.base_w.masses == c.base_w.masses);
  CHECK(back.trim.mode == c.trim.mode);
  CHECK(back.optimizer.multistarts == c.optimizer.multistarts);
  CHECK(back.leave_one_out == c.leave_one_out);
  CHECK(back.seed == c.seed);
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("unknown configuration keys are rejected") {
  CHECK_THROWS_AS(config_from_json(R"({"n": 10, "repz": 4})"), SchemaError);
  CHECK_THROWS_AS(config_from_json("{"), ParseError);
  CHECK_THROWS_AS(config_from_json(R"({"n": 0})"), ConfigError);
}

TEST_CASE("record csv quotes failures and aligns columns") {
  RepRecord ok;
  ok.rep = 0;
  ok.ok = true;
  ok.theta_free = {1.5, 1.2, 0.8};
  ok.chosen_masses = {1.0, 0.5};
  ok.bandwidth = 0.2;
  RepRecord bad;
  bad.rep = 1;
  bad.error = "window empty, \"all\" gone";
  const std::string csv = records_to_csv({ok, bad}, 3, 2);
  CHECK(csv.find("rep,ok,error") == 0);
  CHECK(csv.find("\"window empty, \"\"all\"\" gone\"") != std::string::npos);
  // Column counts must agree across rows; the quoted error field carries a
  // comma of its own, so the count has to respect quoting.
  std::vector<std::size_t> cols;
  std::size_t count = 1;
  bool quoted = false;
  for (char ch : csv) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      ++count;
    } else if (ch == '\n' && !quoted) {
      cols.push_back(count);
      count = 1;
    }
  }
  REQUIRE(cols.size() == 3);
  CHECK(cols[1] == cols[0]);
  CHECK(cols[2] == cols[0]);
}

TEST_CASE("table configurations pin the study designs") {
  const auto t1 = table_configs(1, 42, 2);
  REQUIRE(t1.size() == 2);
  CHECK(t1[0].pipeline == Pipeline::fixed_w);
  CHECK(t1[1].pipeline == Pipeline::adaptive_w);
  CHECK(t1[0].censoring.scale == doctest::Approx(1.38));
  CHECK(t1[0].n == 100);
  CHECK(t1[0].reps == 100);
  CHECK(t1[0].seed == 42);

  const auto t2 = table_configs(2, 7, 1);
  CHECK(t2[0].censoring.scale == doctest::Approx(1.0));
  CHECK(t2[1].pipeline == Pipeline::adaptive_w);

  const auto t3 = table_configs(3, 7, 1);
  REQUIRE(t3.size() == 2);
  for (const auto& c : t3) {
    CHECK(c.pipeline == Pipeline::adaptive_h);
    REQUIRE(c.h_grid.size() == 6);
    CHECK(c.h_grid.front() == doctest::Approx(0.05));
    CHECK(c.h_grid.back() == doctest::Approx(0.30));
  }
  CHECK(t3[0].censoring.scale == doctest::Approx(1.38));
  CHECK(t3[1].censoring.scale == doctest::Approx(1.0));

  CHECK_THROWS_AS(table_configs(4, 1, 1), ConfigError);
}
