// Experiment plumbing: the flat config schema, file/JSON round-tripping,
// deterministic dispatch of the named computations, and CSV/JSON artifact
// writers.
#pragma once

#include "ncchern/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>

#include "json.hpp"

namespace ncchern {

struct ExperimentConfig {
  std::string command;

  std::string model = "chern2d";
  std::map<std::string, double> model_params;

  int L = 16;
  std::string boundary = "open";
  std::int64_t dim_cap = 20000;

  std::vector<double> b_field;  // upper-triangle entries of B

  int n = 1;
  double fermi_energy = 0.0;

  double lambda = 0.0;
  std::vector<std::uint64_t> seeds;  // explicit; wins over seed0/count
  std::uint64_t seed0 = 1;
  int seed_count = 0;

  std::string scheme = "auto";
  double core_fraction = 0.5;

  int grid = 64;
  std::string kspace_method = "auto";

  std::vector<double> radii;
  std::vector<double> x0;
  std::string insertion = "symmetric";

  double s_exponent = 0.5;
  double delta_imag = 1e-3;
  std::vector<int> distances;

  std::vector<double> deltas_h;
  std::uint64_t direction_seed = 777;

  int lemma = 3;
  int trials = 20;
  int rmax = 256;

  std::vector<double> m_values;
  std::vector<double> lambda_values;
  std::string mass_param = "m";

  std::string output;  // empty = stdout
  std::string format;  // "json" | "csv" | "" (per command default)

  int workers = 0;  // 0 = environment default
};

// INI-style "key = value" with [section] headers (or dotted keys); '#'/';'
// comments. JSON input is accepted when the file starts with '{'.
ExperimentConfig config_from_file(const std::string& path);

// Lossless round-trip pair.
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Applies "section.key" -> value pairs onto cfg; unknown keys throw.
void apply_flat_entries(ExperimentConfig& cfg,
                        const std::vector<std::pair<std::string, std::string>>& kv);

// Seed list after resolving seeds/seed0/count; never empty.
std::vector<std::uint64_t> resolve_seeds(const ExperimentConfig& cfg);

// Executes cfg.command, writes the artifact to cfg.output (or stdout).
// Throws Error subclasses on failure.
void run_experiment(const ExperimentConfig& cfg, std::ostream& console);

// Stable mapping from error kinds to process exit codes.
int exit_code_for(const std::string& error_kind);

}  // namespace ncchern
