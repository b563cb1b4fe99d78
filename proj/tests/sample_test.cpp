#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "recur/errors.hpp"
#include "recur/sample.hpp"
#include "recur/sample_io.hpp"

using namespace recur;
namespace fs = std::filesystem;

namespace {

Subject make_subject(double T, bool delta, std::vector<double> Z, std::vector<double> events) {
  Subject s;
  s.T = T;
  s.delta = delta;
  s.Z = std::move(Z);
  s.events = std::move(events);
  return s;
}

Sample three_subjects() {
  Sample s;
  s.subjects = {make_subject(1.0, true, {0.5, 1.5}, {0.25}),
                make_subject(2.0, false, {1.0, 0.0}, {0.7, 1.3}),
                make_subject(3.0, true, {-0.5, 2.0}, {1.5, 2.5})};
  return s;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "recur_sample_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("valid sample passes validation unchanged") {
  const Sample v = validate_sample(three_subjects());
  REQUIRE(v.n() == 3);
  CHECK(v.d() == 2);
  CHECK(v.t_max() == 3.0);
  CHECK(v.subjects[2].events == std::vector<double>{1.5, 2.5});
}

TEST_CASE("validation sorts event times within a subject") {
  Sample s;
  s.subjects = {make_subject(2.0, true, {1.0}, {1.5, 0.5, 1.0})};
  const Sample v = validate_sample(s);
  CHECK(v.subjects[0].events == std::vector<double>{0.5, 1.0, 1.5});
}

TEST_CASE("validation canonicalizes subject order by follow-up time") {
  Sample s = three_subjects();
  std::swap(s.subjects[0], s.subjects[2]);
  const Sample v = validate_sample(s);
  CHECK(v.subjects[0].T == 1.0);
  CHECK(v.subjects[2].T == 3.0);
}

TEST_CASE("validation rejects structural violations") {
  Sample s;
  SUBCASE("event after follow-up") {
    s.subjects = {make_subject(1.0, true, {1.0}, {1.5})};
    CHECK_THROWS_AS(validate_sample(s), EventAfterObservation);
  }
  SUBCASE("event at time zero") {
    s.subjects = {make_subject(1.0, true, {1.0}, {0.0})};
    CHECK_THROWS_AS(validate_sample(s), NegativeTime);
  }
  SUBCASE("negative follow-up") {
    s.subjects = {make_subject(-1.0, true, {1.0}, {})};
    CHECK_THROWS_AS(validate_sample(s), NegativeTime);
  }
  SUBCASE("covariate dimension varies") {
    s.subjects = {make_subject(1.0, true, {1.0}, {}), make_subject(2.0, true, {1.0, 2.0}, {})};
    CHECK_THROWS_AS(validate_sample(s), DimensionMismatch);
  }
  SUBCASE("nonfinite covariate") {
    s.subjects = {make_subject(1.0, true, {std::nan("")}, {})};
    CHECK_THROWS_AS(validate_sample(s), SchemaError);
  }
  SUBCASE("no subjects") { CHECK_THROWS_AS(validate_sample(s), EmptySample); }
}

TEST_CASE("pooled ties are rejected unless jitter is enabled") {
  Sample s;
  s.subjects = {make_subject(1.0, true, {1.0}, {}), make_subject(1.0, false, {2.0}, {})};
  CHECK_THROWS_AS(validate_sample(s), TieViolation);

  // Follow-up colliding with another subject's event time is also a tie.
  Sample s2;
  s2.subjects = {make_subject(1.0, true, {1.0}, {}), make_subject(2.0, false, {2.0}, {1.0})};
  CHECK_THROWS_AS(validate_sample(s2), TieViolation);

  ValidationOptions opts;
  opts.jitter = true;
  opts.seed = 9;
  const Sample v = validate_sample(s, opts);
  REQUIRE(v.n() == 2);
  CHECK(v.subjects[0].T != v.subjects[1].T);
  CHECK(std::abs(v.subjects[0].T - 1.0) < 1e-6);
  CHECK(std::abs(v.subjects[1].T - 1.0) < 1e-6);

  // Deterministic in the seed.
  const Sample v2 = validate_sample(s, opts);
  CHECK(v.subjects[0].T == v2.subjects[0].T);
  CHECK(v.subjects[1].T == v2.subjects[1].T);
}

TEST_CASE("jitter keeps events inside (0, T]") {
  Sample s;
  s.subjects = {make_subject(1.0, true, {1.0}, {1.0}),  // event at T
                make_subject(2.0, false, {2.0}, {1.0})};
  ValidationOptions opts;
  opts.jitter = true;
  const Sample v = validate_sample(s, opts);
  for (const Subject& sub : v.subjects) {
    for (double e : sub.events) {
      CHECK(e > 0.0);
      CHECK(e <= sub.T);
    }
  }
}

TEST_CASE("json round trip preserves every field bit-for-bit") {
  const fs::path path = scratch_dir() / "roundtrip.json";
  const Sample original = validate_sample(three_subjects());
  save_sample_json(original, path.string());
  const Sample loaded = load_sample_json(path.string());
  REQUIRE(loaded.n() == original.n());
  for (std::size_t i = 0; i < original.n(); ++i) {
    CHECK(loaded.subjects[i].T == original.subjects[i].T);
    CHECK(loaded.subjects[i].delta == original.subjects[i].delta);
    CHECK(loaded.subjects[i].Z == original.subjects[i].Z);
    CHECK(loaded.subjects[i].events == original.subjects[i].events);
  }
}

TEST_CASE("csv round trip preserves every field bit-for-bit") {
  const fs::path subjects = scratch_dir() / "rt.csv";
  const fs::path events = scratch_dir() / "rt_events.csv";
  Sample original = validate_sample(three_subjects());
  original.subjects[0].T = 0.1 + 0.2;  // a value without a short decimal form
  original = validate_sample(original);
  save_sample_csv(original, subjects.string(), events.string());
  const Sample loaded = load_sample_csv(subjects.string(), events.string());
  REQUIRE(loaded.n() == original.n());
  for (std::size_t i = 0; i < original.n(); ++i) {
    CHECK(loaded.subjects[i].T == original.subjects[i].T);
    CHECK(loaded.subjects[i].delta == original.subjects[i].delta);
    CHECK(loaded.subjects[i].Z == original.subjects[i].Z);
    CHECK(loaded.subjects[i].events == original.subjects[i].events);
  }
}

TEST_CASE("load_sample dispatches on format and derives the events path") {
  CHECK(default_events_path("data.csv") == "data_events.csv");
  CHECK(default_events_path("a/b/data.csv") == "a/b/data_events.csv");

  const fs::path subjects = scratch_dir() / "disp.csv";
  const Sample original = validate_sample(three_subjects());
  save_sample_csv(original, subjects.string(), default_events_path(subjects.string()));
  const Sample loaded = load_sample(subjects.string(), SampleFormat::csv);
  CHECK(loaded.n() == 3);

  const fs::path jpath = scratch_dir() / "disp.json";
  save_sample_json(original, jpath.string());
  CHECK(load_sample(jpath.string(), SampleFormat::json).n() == 3);
}

TEST_CASE("two-subject json fixture loads") {
  const fs::path path = scratch_dir() / "two.json";
  std::ofstream(path) << R"({"d": 1, "subjects": [
    {"T": 1.0, "delta": 1, "Z": [0.5], "events": [0.25]},
    {"T": 2.0, "delta": 0, "Z": [1.5], "events": []}]})";
  const Sample s = load_sample_json(path.string());
  CHECK(s.n() == 2);
  CHECK(s.d() == 1);
  CHECK(s.subjects[1].delta == false);
}

TEST_CASE("malformed files raise schema or parse errors") {
  const fs::path dir = scratch_dir();
  SUBCASE("csv missing delta column") {
    const fs::path p = dir / "bad.csv";
    std::ofstream(p) << "id,T,z1\n1,1.0,0.5\n";
    std::ofstream(dir / "bad_events.csv") << "id,event_time\n";
    CHECK_THROWS_AS(load_sample_csv(p.string(), (dir / "bad_events.csv").string()), SchemaError);
  }
  SUBCASE("csv event referencing unknown id") {
    const fs::path p = dir / "orphan.csv";
    std::ofstream(p) << "id,T,delta,z1\n1,1.0,1,0.5\n";
    std::ofstream(dir / "orphan_events.csv") << "id,event_time\n7,0.5\n";
    CHECK_THROWS_AS(load_sample_csv(p.string(), (dir / "orphan_events.csv").string()),
                    SchemaError);
  }
  SUBCASE("csv duplicate subject id") {
    const fs::path p = dir / "dup.csv";
    std::ofstream(p) << "id,T,delta,z1\n1,1.0,1,0.5\n1,2.0,1,0.6\n";
    std::ofstream(dir / "dup_events.csv") << "id,event_time\n";
    CHECK_THROWS_AS(load_sample_csv(p.string(), (dir / "dup_events.csv").string()), SchemaError);
  }
  SUBCASE("csv non-numeric field") {
    const fs::path p = dir / "nan.csv";
    std::ofstream(p) << "id,T,delta,z1\n1,abc,1,0.5\n";
    std::ofstream(dir / "nan_events.csv") << "id,event_time\n";
    CHECK_THROWS_AS(load_sample_csv(p.string(), (dir / "nan_events.csv").string()), ParseError);
  }
  SUBCASE("json missing key") {
    const fs::path p = dir / "nokey.json";
    std::ofstream(p) << R"({"subjects": []})";
    CHECK_THROWS_AS(load_sample_json(p.string()), SchemaError);
  }
  SUBCASE("json syntax error") {
    const fs::path p = dir / "syntax.json";
    std::ofstream(p) << "{";
    CHECK_THROWS_AS(load_sample_json(p.string()), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_sample_json((dir / "absent.json").string()), ParseError);
  }
}

TEST_CASE("csv serialization is stable across a save-load-save cycle") {
  const fs::path dir = scratch_dir();
  const fs::path a = dir / "stable_a.csv";
  const fs::path b = dir / "stable_b.csv";
  const Sample original = validate_sample(three_subjects());
  save_sample_csv(original, a.string(), default_events_path(a.string()));
  const Sample loaded = load_sample(a.string(), SampleFormat::csv);
  save_sample_csv(loaded, b.string(), default_events_path(b.string()));
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(default_events_path(a.string())) == slurp(default_events_path(b.string())));
}
