#include "dwarp/runner.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace dwarp;

namespace {

const char* kDemoConfig = R"(
# comment line
base = circle
rho = exp
rho.rate = 1.0
h = 2+cos
h.offset = 2.0
h.amplitude = 1.0
interval = 0,2
grids = 32,64
suites = counterexample
seed = 9
trials = 5
out = OUTDIR
)";

std::string with_out(const std::string& dir) {
  std::string text = kDemoConfig;
  const auto pos = text.find("OUTDIR");
  text.replace(pos, 6, dir);
  return text;
}

} // namespace

TEST_CASE("configs parse with comments and defaults") {
  const RunConfig config = RunConfig::from_string(with_out("/tmp/dwarp_cfg_test"));
  CHECK(config.base_kind == "circle");
  CHECK(config.rho_kind == "exp");
  CHECK(config.h_kind == "2+cos");
  CHECK(config.t_min == 0.0);
  CHECK(config.t_max == 2.0);
  CHECK(config.grids == std::vector<int>{32, 64});
  CHECK(config.seed == 9);
  CHECK(config.trials == 5);
  CHECK(config.base_radius == 1.0); // default
}

TEST_CASE("config errors carry the offending field") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      (void)RunConfig::from_string(text);
      FAIL_CHECK("expected a ConfigError for: " << needle);
    } catch (const ConfigError& err) {
      CHECK(std::string(err.what()).find(needle) != std::string::npos);
    }
  };
  expect_error("bogus = 1\nsuites = identities\n", "unknown key");
  expect_error("suites = identities\nrho = nope\n", "rho");
  expect_error("suites = identities\ngrids = 64,32\n", "strictly increasing");
  expect_error("suites = identities\nseed = -3\n", "seed");
  expect_error("suites = identities\ninterval = 2,0\n", "interval");
  expect_error("suites = nope\n", "suites");
  expect_error("suites = identities\ntrials = 0\n", "trials");

  // An empty suite list cannot pass validation.
  RunConfig config;
  config.suites.clear();
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("canonical form and hash are stable") {
  const RunConfig a = RunConfig::from_string(with_out("/tmp/dwarp_cfg_hash"));
  const RunConfig b = RunConfig::from_string(with_out("/tmp/dwarp_cfg_hash"));
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());
  RunConfig c = b;
  c.seed = 10;
  CHECK(a.hash() != c.hash());
}

TEST_CASE("builders reject incompatible presets") {
  RunConfig config = RunConfig::from_string(with_out("/tmp/dwarp_cfg_build"));
  config.base_kind = "plane";
  // The cosine potential needs a circle or torus base.
  CHECK_THROWS_AS((void)build_spacetime(config), ConfigError);
}

TEST_CASE("repeated runs produce byte-identical reports") {
  namespace fs = std::filesystem;
  const fs::path dir_a = fs::temp_directory_path() / "dwarp_run_a";
  const fs::path dir_b = fs::temp_directory_path() / "dwarp_run_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  RunConfig config = RunConfig::from_string(with_out(dir_a.string()));
  const RunReport first = run(config);
  config.out_dir = dir_b.string();
  const RunReport second = run(config);

  CHECK(first.overall_pass);
  CHECK(first.to_json_string() == second.to_json_string());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(slurp(dir_a / "report.json") == slurp(dir_b / "report.json"));
  CHECK(!slurp(dir_a / "report.json").empty());
  CHECK(slurp(dir_a / "cylinder_defects.csv") == slurp(dir_b / "cylinder_defects.csv"));

  // The CSV starts with the config stamp.
  const std::string csv = slurp(dir_a / "cylinder_defects.csv");
  CHECK(csv.rfind("# config " + config.hash(), 0) == 0);

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("run seeds change the random battery but not the layout") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dwarp_run_seed";
  fs::remove_all(dir);
  RunConfig config = RunConfig::from_string(with_out(dir.string()));
  config.suites = {"rigidity"};
  config.grids = {32};
  config.trials = 4;

  const RunReport a = run(config);
  config.seed = 10;
  const RunReport b = run(config);
  CHECK(a.report["suites"]["rigidity"].contains("compact_rigidity"));
  CHECK(a.report["suites"]["rigidity"]["compact_rigidity"]["details"] !=
        b.report["suites"]["rigidity"]["compact_rigidity"]["details"]);
  fs::remove_all(dir);
}

TEST_CASE("parallel work respects the thread cap and writes by slot") {
  const int saved = max_threads();
  std::vector<int> out(257, -1);
  set_max_threads(3);
  CHECK(max_threads() == 3);
  parallel_for(257, [&](int i) { out[i] = 2 * i; });
  for (int i = 0; i < 257; ++i) CHECK(out[i] == 2 * i);
  set_max_threads(saved);
}

TEST_CASE("the preset catalog names every preset family") {
  const std::string text = list_presets_text();
  for (const char* needle : {"circle", "torus2", "sphere2", "plane", "constant", "exp", "cosh",
                             "poly", "2+cos", "radial-exp", "radial-pow"}) {
    CHECK(text.find(needle) != std::string::npos);
  }
}
