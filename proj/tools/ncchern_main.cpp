// Command-line front end. A config file (INI sections or JSON) supplies
// defaults; any flag given on the command line overrides the file.
#include "CLI11.hpp"

#include "ncchern/experiment.hpp"

#include <iostream>
#include <string>
#include <vector>

namespace {

using ncchern::ExperimentConfig;

// Flags funnel through the same flat key/value channel as config files, so
// validation and error text match between the two.
struct FlagSink {
  std::map<std::string, std::string> storage;
  std::vector<std::pair<CLI::Option*, std::string>> seen;

  void bind(CLI::App* cmd, const std::string& flag, const std::string& key,
            const std::string& desc) {
    auto [it, fresh] = storage.try_emplace(flag + "@" + cmd->get_name());
    CLI::Option* opt = cmd->add_option(flag, it->second, desc);
    seen.emplace_back(opt, key);
    (void)fresh;
  }

  void collect(ExperimentConfig& cfg) const {
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& [opt, key] : seen)
      if (opt->count() > 0)
        entries.emplace_back(key, opt->results().back());
    ncchern::apply_flat_entries(cfg, entries);
  }
};

void add_model_flags(CLI::App* cmd, FlagSink& sink,
                     std::vector<std::string>& params) {
  sink.bind(cmd, "--model", "model.name", "model name from the zoo");
  cmd->add_option("--param", params, "model parameter as name=value")
      ->take_all();
  sink.bind(cmd, "--n", "physics.n", "half the space dimension");
  sink.bind(cmd, "--fermi", "physics.fermi_energy", "Fermi energy");
}

void add_volume_flags(CLI::App* cmd, FlagSink& sink) {
  sink.bind(cmd, "--L", "volume.L", "sites per axis");
  sink.bind(cmd, "--boundary", "volume.boundary", "open | periodic");
  sink.bind(cmd, "--dim-cap", "volume.dim_cap", "refuse matrices above this");
  sink.bind(cmd, "--b", "field.b", "magnetic field, upper-triangle entries");
}

void add_disorder_flags(CLI::App* cmd, FlagSink& sink) {
  sink.bind(cmd, "--lambda", "disorder.lambda", "disorder strength");
  sink.bind(cmd, "--seeds", "disorder.seeds", "explicit seed list");
  sink.bind(cmd, "--seed0", "disorder.seed0", "first seed");
  sink.bind(cmd, "--seed-count", "disorder.count", "number of seeds");
}

void add_scheme_flags(CLI::App* cmd, FlagSink& sink) {
  sink.bind(cmd, "--scheme", "scheme.kind",
            "auto | open-commutator | periodic-phase | periodic-min-image");
  sink.bind(cmd, "--core-fraction", "core.fraction",
            "linear fraction of the volume traced over");
}

void add_output_flags(CLI::App* cmd, FlagSink& sink) {
  sink.bind(cmd, "--output", "output.path", "write here instead of stdout");
  sink.bind(cmd, "--format", "output.format", "json | csv");
  sink.bind(cmd, "--workers", "run.workers", "threads (0 = auto)");
  cmd->add_option("--config", "config file consumed before flag overrides");
}

void apply_params(ExperimentConfig& cfg, const std::vector<std::string>& params) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const std::string& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ncchern::ConfigError("--param expects name=value, got '" + p + "'");
    entries.emplace_back("model." + p.substr(0, eq), p.substr(eq + 1));
  }
  ncchern::apply_flat_entries(cfg, entries);
}

std::string prescan_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  try {
    ExperimentConfig cfg;
    const std::string config_path = prescan_config_path(argc, argv);
    if (!config_path.empty()) cfg = ncchern::config_from_file(config_path);

    CLI::App app{"non-commutative Chern numbers for disordered lattices"};
    app.require_subcommand(0, 1);
    app.add_option("--config", "config file consumed before flag overrides");

    FlagSink sink;
    std::vector<std::string> params;

    CLI::App* kspace = app.add_subcommand(
        "kspace", "Brillouin-zone curvature sum for a clean model");
    add_model_flags(kspace, sink, params);
    sink.bind(kspace, "--grid", "kspace.grid", "points per axis");
    sink.bind(kspace, "--kspace-method", "kspace.method",
              "auto | plaquette | central-diff | analytic");
    add_output_flags(kspace, sink);

    CLI::App* realspace = app.add_subcommand(
        "realspace", "real-space trace formula on a finite volume");
    add_model_flags(realspace, sink, params);
    add_volume_flags(realspace, sink);
    add_disorder_flags(realspace, sink);
    add_scheme_flags(realspace, sink);
    add_output_flags(realspace, sink);

    CLI::App* index = app.add_subcommand(
        "index", "Fredholm index from the phase-commutator supertrace");
    add_model_flags(index, sink, params);
    add_volume_flags(index, sink);
    add_disorder_flags(index, sink);
    sink.bind(index, "--radii", "index.radii", "truncation radii");
    sink.bind(index, "--x0", "index.x0", "phase origin offset in [0,1)^2n");
    sink.bind(index, "--insertion", "index.insertion", "symmetric | gamma1");
    add_output_flags(index, sink);

    CLI::App* loc = app.add_subcommand(
        "localization", "fractional-moment decay rate of the resolvent");
    add_model_flags(loc, sink, params);
    add_volume_flags(loc, sink);
    add_disorder_flags(loc, sink);
    sink.bind(loc, "--s", "fracmom.s", "fractional moment exponent in (0,1)");
    sink.bind(loc, "--delta", "fracmom.delta", "imaginary offset of the energy");
    sink.bind(loc, "--distances", "fracmom.distances", "hop distances to fit");
    sink.bind(loc, "--lambda-values", "phase.lambda_values",
              "sweep these disorder strengths");
    add_output_flags(loc, sink);

    CLI::App* verify = app.add_subcommand(
        "verify-identity", "numerical check of an analytic identity");
    sink.bind(verify, "--lemma", "identity.lemma", "which identity: 3 | 5");
    sink.bind(verify, "--trials", "identity.trials", "random point sets");
    sink.bind(verify, "--rmax", "identity.rmax", "lattice cutoff radius");
    sink.bind(verify, "--n", "physics.n", "half the space dimension");
    sink.bind(verify, "--seed0", "disorder.seed0", "trial stream seed");
    add_output_flags(verify, sink);

    CLI::App* phase = app.add_subcommand(
        "phase-diagram", "disorder-averaged invariant over a parameter grid");
    add_model_flags(phase, sink, params);
    add_volume_flags(phase, sink);
    add_disorder_flags(phase, sink);
    add_scheme_flags(phase, sink);
    sink.bind(phase, "--m-values", "phase.m_values", "mass sweep values");
    sink.bind(phase, "--lambda-values", "phase.lambda_values",
              "disorder sweep values");
    sink.bind(phase, "--mass-param", "phase.mass_param",
              "model parameter the m axis drives");
    add_output_flags(phase, sink);

    CLI::App* sobolev = app.add_subcommand(
        "sobolev", "projector continuity under Hamiltonian deformation");
    add_model_flags(sobolev, sink, params);
    add_volume_flags(sobolev, sink);
    add_disorder_flags(sobolev, sink);
    add_scheme_flags(sobolev, sink);
    sink.bind(sobolev, "--deltas", "sobolev.deltas", "deformation sizes");
    sink.bind(sobolev, "--direction-seed", "sobolev.direction_seed",
              "seed of the deformation direction");
    add_output_flags(sobolev, sink);

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      return app.exit(e);
    }

    for (CLI::App* sub : {kspace, realspace, index, loc, verify, phase, sobolev})
      if (sub->parsed()) cfg.command = sub->get_name();

    sink.collect(cfg);
    apply_params(cfg, params);

    if (cfg.command.empty()) {
      std::cout << app.help();
      return 2;
    }

    ncchern::run_experiment(cfg, std::cout);
    return 0;
  } catch (const ncchern::Error& e) {
    nlohmann::ordered_json err;
    err["error"] = {{"kind", e.kind}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    return ncchern::exit_code_for(e.kind);
  } catch (const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"] = {{"kind", "other"}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    return 1;
  }
}
