// End-to-end checks of the command line binary. The binary path arrives in
// RECUR_CLI_PATH; every case works in its own scratch directory.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "recur/criteria.hpp"
#include "recur/measure.hpp"
#include "recur/sample_io.hpp"
#include "recur/survival.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli() {
#ifdef RECUR_CLI_PATH
  return RECUR_CLI_PATH;
#else
  const char* p = std::getenv("RECUR_CLI_PATH");
  REQUIRE_MESSAGE(p != nullptr, "RECUR_CLI_PATH must point at the binary");
  return std::string(p);
#endif
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("recur_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& dir) {
  const std::string cmd = "\"" + cli() + "\" " + args + " > \"" + (dir / "stdout.txt").string() +
                          "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(is), ("missing " + path.string()));
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

bool dir_has_tmp_files(const fs::path& dir) {
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".tmp") return true;
  }
  return false;
}

}  // namespace

TEST_CASE("parametric fit reproduces the in-process result exactly") {
  const fs::path dir = scratch("fit_parametric");
  const recur::Sample s = test_support::gen_sample(60, 3);
  const fs::path data = dir / "sample.json";
  recur::save_sample_json(s, data.string());

  const int rc = run("fit --model parametric --mu0 linear --data \"" + data.string() +
                         "\" --out \"" + dir.string() + "\"",
                     dir);
  CHECK(rc == 0);
  const json got = json::parse(slurp(dir / "fit.json"));

  const recur::Sample loaded = recur::load_sample_json(data.string());
  const auto base_w = recur::equispaced_unit_measure(0.9 * loaded.t_max(), 12);
  const auto cens = recur::kaplan_meier_censoring(loaded);
  const auto domain = recur::ThetaDomain::uniform(loaded.d(), 0.0, 3.0);
  const recur::FitReport want = recur::fit_parametric(
      recur::linear_parametric_model(loaded.d()), base_w, loaded, cens, domain);

  REQUIRE(got.at("theta_hat").size() == want.theta_hat.size());
  for (std::size_t k = 0; k < want.theta_hat.size(); ++k) {
    CHECK(got["theta_hat"][k].get<double>() == want.theta_hat[k]);
  }
  CHECK(got.at("criterion_value").get<double>() == want.criterion_value);
  CHECK(got.at("converged").get<bool>() == want.converged);
  CHECK(slurp(dir / "stderr.txt").find("\"subcommand\": \"fit\"") != std::string::npos);
}

TEST_CASE("csv and json inputs give byte-identical reports") {
  const fs::path dir = scratch("fit_csv");
  const recur::Sample s = test_support::gen_sample(40, 11);
  recur::save_sample_json(s, (dir / "sample.json").string());
  recur::save_sample_csv(s, (dir / "sample.csv").string(), (dir / "sample_events.csv").string());

  const fs::path out_json = dir / "from_json";
  const fs::path out_csv = dir / "from_csv";
  CHECK(run("fit --model parametric --data \"" + (dir / "sample.json").string() + "\" --out \"" +
                out_json.string() + "\"",
            dir) == 0);
  CHECK(run("fit --model parametric --data \"" + (dir / "sample.csv").string() + "\" --out \"" +
                out_csv.string() + "\"",
            dir) == 0);
  CHECK(slurp(out_json / "fit.json") == slurp(out_csv / "fit.json"));
}

TEST_CASE("single index fit emits a complete report") {
  const fs::path dir = scratch("fit_single_index");
  const recur::Sample s = test_support::gen_sample(40, 7);
  const fs::path data = dir / "sample.json";
  recur::save_sample_json(s, data.string());

  const int rc = run("fit --model single-index --bandwidth 0.3 --data \"" + data.string() +
                         "\" --out \"" + dir.string() + "\"",
                     dir);
  REQUIRE(rc == 0);
  const json got = json::parse(slurp(dir / "fit.json"));
  REQUIRE(got.at("theta_hat").size() == 4);
  CHECK(got["theta_hat"][0].get<double>() == 1.0);
  CHECK(got.at("chosen_bandwidth").get<double>() == 0.3);
  CHECK(got.at("converged").get<bool>());
  CHECK(got.at("criterion_value").is_number());
  CHECK(got.at("iterations").get<int>() > 0);
  REQUIRE(got.contains("chosen_measure"));
  CHECK(got["chosen_measure"].at("support").size() == 12);
  CHECK(got.contains("variance_matrix"));
  CHECK(got.contains("mse_estimate"));
  REQUIRE(got.at("free_components").size() == 3);
  CHECK(got["free_components"][0].get<double>() == got["theta_hat"][1].get<double>());
}

TEST_CASE("fit text format prints a readable summary") {
  const fs::path dir = scratch("fit_text");
  const recur::Sample s = test_support::gen_sample(30, 19);
  const fs::path data = dir / "sample.json";
  recur::save_sample_json(s, data.string());
  const int rc =
      run("fit --model parametric --format text --data \"" + data.string() + "\"", dir);
  CHECK(rc == 0);
  const std::string out = slurp(dir / "stdout.txt");
  CHECK(out.find("theta_hat:") == 0);
  CHECK(out.find("criterion:") != std::string::npos);
}

TEST_CASE("tied follow-up times need an explicit jitter seed") {
  const fs::path dir = scratch("fit_ties");
  const fs::path data = dir / "tied.json";
  {
    std::ofstream os(data);
    os << R"({"d": 1, "subjects": [)"
       << R"({"T": 1.0, "delta": 1, "Z": [1.2], "events": [0.5]},)"
       << R"({"T": 1.0, "delta": 1, "Z": [1.4], "events": [0.7]}]})";
  }
  CHECK(run("fit --model parametric --data \"" + data.string() + "\"", dir) == 2);
  CHECK(run("fit --model parametric --seed 9 --data \"" + data.string() + "\"", dir) == 0);
}

TEST_CASE("data and flag errors exit with code 2 and leave no artifacts") {
  const fs::path dir = scratch("fit_errors");
  const fs::path out = dir / "out";

  CHECK(run("fit --model parametric --data \"" + (dir / "absent.json").string() + "\" --out \"" +
                out.string() + "\"",
            dir) == 2);
  CHECK(!fs::exists(out / "fit.json"));

  const recur::Sample s = test_support::gen_sample(20, 2);
  const fs::path data = dir / "sample.json";
  recur::save_sample_json(s, data.string());

  CHECK(run("fit --bandwidth auto --data \"" + data.string() + "\"", dir) == 2);
  CHECK(run("fit --bandwidth -0.5 --data \"" + data.string() + "\"", dir) == 2);
  CHECK(run("fit --h-grid 0.3:-0.1:0.1 --bandwidth auto --data \"" + data.string() + "\"", dir) ==
        2);
  CHECK(run("fit --model parametric --weights adaptive --data \"" + data.string() + "\"", dir) ==
        2);
  CHECK(run("fit --weights adaptive --bandwidth auto --h-grid 0.1:0.1:0.3 --data \"" +
                data.string() + "\"",
            dir) == 2);
  CHECK(run("fit --require-seed --data \"" + data.string() + "\"", dir) == 2);
  CHECK(run("fit --bogus-flag --data \"" + data.string() + "\"", dir) == 2);
  CHECK(run("fit", dir) == 2);  // --data is required
  CHECK(run("", dir) == 2);     // a subcommand is required
  CHECK(run("--help", dir) == 0);
  CHECK(!fs::exists(out / "fit.json"));
  CHECK(!dir_has_tmp_files(dir));
}

TEST_CASE("simulate runs are deterministic across invocations and workers") {
  const fs::path dir = scratch("simulate_determinism");
  const fs::path a = dir / "a";
  const fs::path b = dir / "b";
  const fs::path c = dir / "c";
  const std::string base = "simulate --n 40 --reps 4 --seed 5 ";
  REQUIRE(run(base + "--jobs 1 --out \"" + a.string() + "\"", dir) == 0);
  REQUIRE(run(base + "--jobs 1 --out \"" + b.string() + "\"", dir) == 0);
  REQUIRE(run(base + "--jobs 3 --out \"" + c.string() + "\"", dir) == 0);
  CHECK(slurp(a / "records.csv") == slurp(b / "records.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  CHECK(slurp(a / "records.csv") == slurp(c / "records.csv"));
  CHECK(slurp(a / "summary.json") == slurp(c / "summary.json"));

  const json summary = json::parse(slurp(a / "summary.json"));
  CHECK(summary.at("reps_used").get<int>() == 4);
  CHECK(summary.at("config").at("seed").get<int>() == 5);
}

TEST_CASE("simulate honors config files and rejects malformed ones") {
  const fs::path dir = scratch("simulate_config");
  const fs::path cfg = dir / "study.json";
  {
    std::ofstream os(cfg);
    os << R"({"n": 30, "reps": 2, "seed": 13, "censoring": {"shape": 4.0, "scale": 1.38}})";
  }
  const fs::path out = dir / "out";
  REQUIRE(run("simulate --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"", dir) ==
          0);
  const json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("config").at("n").get<int>() == 30);
  CHECK(summary.at("config").at("reps").get<int>() == 2);

  const fs::path bad = dir / "bad.json";
  {
    std::ofstream os(bad);
    os << R"({"n": 30, "repz": 2})";
  }
  CHECK(run("simulate --config \"" + bad.string() + "\"", dir) == 2);
  CHECK(run("simulate --require-seed --n 10 --reps 1", dir) == 2);
}

TEST_CASE("a study whose replications all fail exits 4 with no artifacts") {
  const fs::path dir = scratch("simulate_failures");
  const fs::path cfg = dir / "study.json";
  {
    std::ofstream os(cfg);
    // A vanishing bandwidth empties every smoothing window.
    os << R"({"n": 10, "reps": 4, "seed": 1, "kernel": {"family": "epanechnikov", "h": 1e-7}})";
  }
  const fs::path out = dir / "out";
  CHECK(run("simulate --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"", dir) ==
        4);
  CHECK(!fs::exists(out / "records.csv"));
  CHECK(!fs::exists(out / "summary.json"));
}

TEST_CASE("reproduce validates its flags before doing any work") {
  const fs::path dir = scratch("reproduce_flags");
  CHECK(run("reproduce --table 9", dir) == 2);
  CHECK(run("reproduce --table 0", dir) == 2);
  CHECK(run("reproduce", dir) == 2);  // --table is required
  CHECK(run("reproduce --table 1 --require-seed", dir) == 2);
}
