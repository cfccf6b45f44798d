#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ncchern/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace ncchern;

namespace {

std::string temp_path(const char* stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

std::string write_temp(const char* stem, const std::string& text) {
  const std::string path = temp_path(stem);
  std::ofstream(path) << text;
  return path;
}

// everything but the wall-clock line
std::string strip_timestamp(const std::string& payload) {
  std::istringstream in(payload);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("ini config files parse sections, comments and dotted keys") {
  const std::string path = write_temp("ncchern_cfg.ini", R"(
command = realspace   # trailing comment
[model]
name = chern2d
m = 1.5
[volume]
L = 12
boundary = periodic
[disorder]
lambda = 2.5
seeds = 3, 5, 8
[kspace]
grid = 48
; full-line comment
core.fraction = 0.25
)");
  const ExperimentConfig cfg = config_from_file(path);
  std::remove(path.c_str());
  CHECK(cfg.command == "realspace");
  CHECK(cfg.model == "chern2d");
  CHECK(cfg.model_params.at("m") == 1.5);
  CHECK(cfg.L == 12);
  CHECK(cfg.boundary == "periodic");
  CHECK(cfg.lambda == 2.5);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 5, 8});
  CHECK(cfg.grid == 48);
  CHECK(cfg.core_fraction == 0.25);  // dotted key overrides the open section
}

TEST_CASE("a file starting with a brace is read as JSON") {
  const std::string path = write_temp("ncchern_cfg.json", R"({
    "command": "kspace",
    "model": {"name": "dirac4d", "params": {"m": -3.0}},
    "physics": {"n": 2},
    "kspace": {"grid": 10}
  })");
  const ExperimentConfig cfg = config_from_file(path);
  std::remove(path.c_str());
  CHECK(cfg.command == "kspace");
  CHECK(cfg.model == "dirac4d");
  CHECK(cfg.model_params.at("m") == -3.0);
  CHECK(cfg.n == 2);
  CHECK(cfg.grid == 10);
}

TEST_CASE("config survives a json round trip") {
  ExperimentConfig cfg;
  cfg.command = "index";
  cfg.model = "dirac4d";
  cfg.model_params = {{"m", -3.0}};
  cfg.L = 7;
  cfg.boundary = "periodic";
  cfg.dim_cap = 5000;
  cfg.b_field = {0.25};
  cfg.n = 2;
  cfg.fermi_energy = 0.125;
  cfg.lambda = 1.75;
  cfg.seeds = {11, 13};
  cfg.seed0 = 4;
  cfg.seed_count = 6;
  cfg.scheme = "min-image";
  cfg.core_fraction = 0.375;
  cfg.grid = 36;
  cfg.kspace_method = "plaquette";
  cfg.radii = {2.5, 4.0};
  cfg.x0 = {0.5, 0.5};
  cfg.insertion = "first";
  cfg.s_exponent = 0.375;
  cfg.delta_imag = 0.005;
  cfg.distances = {2, 4, 6, 8};
  cfg.deltas_h = {0.2, 0.1};
  cfg.direction_seed = 1234;
  cfg.lemma = 5;
  cfg.trials = 7;
  cfg.rmax = 64;
  cfg.m_values = {0.5, 1.5};
  cfg.lambda_values = {0.0, 3.0};
  cfg.mass_param = "m";
  cfg.output = "out.json";
  cfg.format = "json";
  cfg.workers = 3;

  const ExperimentConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.command == cfg.command);
  CHECK(back.model == cfg.model);
  CHECK(back.model_params == cfg.model_params);
  CHECK(back.L == cfg.L);
  CHECK(back.boundary == cfg.boundary);
  CHECK(back.dim_cap == cfg.dim_cap);
  CHECK(back.b_field == cfg.b_field);
  CHECK(back.n == cfg.n);
  CHECK(back.fermi_energy == cfg.fermi_energy);
  CHECK(back.lambda == cfg.lambda);
  CHECK(back.seeds == cfg.seeds);
  CHECK(back.seed0 == cfg.seed0);
  CHECK(back.seed_count == cfg.seed_count);
  CHECK(back.scheme == cfg.scheme);
  CHECK(back.core_fraction == cfg.core_fraction);
  CHECK(back.grid == cfg.grid);
  CHECK(back.kspace_method == cfg.kspace_method);
  CHECK(back.radii == cfg.radii);
  CHECK(back.x0 == cfg.x0);
  CHECK(back.insertion == cfg.insertion);
  CHECK(back.s_exponent == cfg.s_exponent);
  CHECK(back.delta_imag == cfg.delta_imag);
  CHECK(back.distances == cfg.distances);
  CHECK(back.deltas_h == cfg.deltas_h);
  CHECK(back.direction_seed == cfg.direction_seed);
  CHECK(back.lemma == cfg.lemma);
  CHECK(back.trials == cfg.trials);
  CHECK(back.rmax == cfg.rmax);
  CHECK(back.m_values == cfg.m_values);
  CHECK(back.lambda_values == cfg.lambda_values);
  CHECK(back.mass_param == cfg.mass_param);
  CHECK(back.output == cfg.output);
  CHECK(back.format == cfg.format);
  CHECK(back.workers == cfg.workers);
}

TEST_CASE("unknown keys are rejected by name") {
  ExperimentConfig cfg;
  try {
    apply_flat_entries(cfg, {{"volume.shape", "cube"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("volume.shape") != std::string::npos);
  }
}

TEST_CASE("seed resolution: explicit list wins, else seed0 counts up") {
  ExperimentConfig cfg;
  cfg.seeds = {7, 9};
  cfg.seed0 = 100;
  cfg.seed_count = 5;
  CHECK(resolve_seeds(cfg) == std::vector<std::uint64_t>{7, 9});
  cfg.seeds.clear();
  CHECK(resolve_seeds(cfg) ==
        std::vector<std::uint64_t>{100, 101, 102, 103, 104});
  cfg.seed_count = 0;
  CHECK(resolve_seeds(cfg) == std::vector<std::uint64_t>{100});
}

TEST_CASE("error kinds map to stable exit codes") {
  CHECK(exit_code_for("config") == 2);
  CHECK(exit_code_for("dimension") == 3);
  CHECK(exit_code_for("geometry") == 4);
  CHECK(exit_code_for("flux") == 5);
  CHECK(exit_code_for("gap") == 6);
  CHECK(exit_code_for("lookup") == 7);
  CHECK(exit_code_for("precision") == 8);
  CHECK(exit_code_for("resource") == 9);
  CHECK(exit_code_for("scheme") == 10);
  CHECK(exit_code_for("anything else") == 1);
}

TEST_CASE("json envelope carries version, config echo and result") {
  ExperimentConfig cfg;
  cfg.command = "kspace";
  cfg.model_params = {{"m", 1.0}};
  cfg.grid = 8;
  std::ostringstream out;
  run_experiment(cfg, out);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["schema_version"].get<int>() == 1);
  CHECK(j.contains("tool_version"));
  CHECK(j.contains("timestamp"));
  CHECK(j["config"]["kspace"]["grid"].get<int>() == 8);
  CHECK(j["result"]["method"].get<std::string>() == "kspace");
  CHECK(j["result"]["value"].get<double>() == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("repeat runs differ only in the timestamp line") {
  ExperimentConfig cfg;
  cfg.command = "kspace";
  cfg.model_params = {{"m", 1.0}};
  cfg.grid = 8;
  std::ostringstream a, b;
  run_experiment(cfg, a);
  run_experiment(cfg, b);
  CHECK(strip_timestamp(a.str()) == strip_timestamp(b.str()));
}

TEST_CASE("csv artifacts start with the schema banner") {
  ExperimentConfig cfg;
  cfg.command = "localization";
  cfg.model = "atomic";
  cfg.L = 12;
  cfg.boundary = "periodic";
  cfg.lambda = 2.0;
  cfg.seeds = {1};
  cfg.distances = {2, 3, 4, 5};
  std::ostringstream out;
  run_experiment(cfg, out);
  std::istringstream lines(out.str());
  std::string banner, header;
  std::getline(lines, banner);
  std::getline(lines, header);
  CHECK(banner == "# ncchern schema_version=1");
  CHECK(header.find("beta") != std::string::npos);
  CHECK(header.find("decay_tstat") != std::string::npos);
}

TEST_CASE("only the implemented identity checks are dispatchable") {
  ExperimentConfig cfg;
  cfg.command = "verify-identity";
  cfg.lemma = 4;
  std::ostringstream out;
  CHECK_THROWS_AS(run_experiment(cfg, out), ConfigError);
}

TEST_CASE("momentum sums refuse a magnetic field") {
  ExperimentConfig cfg;
  cfg.command = "kspace";
  cfg.model_params = {{"m", 1.0}};
  cfg.b_field = {0.25};
  std::ostringstream out;
  CHECK_THROWS_AS(run_experiment(cfg, out), ConfigError);
}

TEST_CASE("incommensurate flux is refused on the torus") {
  ExperimentConfig cfg;
  cfg.command = "realspace";
  cfg.model = "atomic";
  cfg.L = 6;
  cfg.boundary = "periodic";
  cfg.b_field = {0.15};  // 0.15 * 6 is not an integer
  cfg.seeds = {1};
  std::ostringstream out;
  // per-seed failures come back rewrapped but keep the error kind
  try {
    run_experiment(cfg, out);
    FAIL("expected a flux error");
  } catch (const Error& e) {
    CHECK(e.kind == "flux");
  }
}
