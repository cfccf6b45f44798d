#include "ncchern/experiment.hpp"

#include "ncchern/chern.hpp"
#include "ncchern/clifford.hpp"
#include "ncchern/fredholm.hpp"
#include "ncchern/localization.hpp"
#include "ncchern/model.hpp"
#include "ncchern/nctorus.hpp"
#include "ncchern/oracles.hpp"
#include "ncchern/parallel.hpp"
#include "ncchern/rng.hpp"
#include "ncchern/volume.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ncchern {

namespace {

using ojson = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse number '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse integer '" + v + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse seed '" + v + "'");
  }
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  for (const std::string& item : split_list(v))
    out.push_back(parse_double(key, item));
  return out;
}

std::string fmt(double v) {
  char buf[48];
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

// JSON cannot carry infinities; the decay rate of an exactly-vanishing
// moment table is reported as the string "inf"
ojson json_rate(double beta) {
  if (std::isinf(beta)) return beta > 0 ? "inf" : "-inf";
  return beta;
}

}  // namespace

void apply_flat_entries(
    ExperimentConfig& cfg,
    const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "command") cfg.command = value;
    else if (key == "model.name") cfg.model = value;
    else if (key.rfind("model.", 0) == 0)
      cfg.model_params[key.substr(6)] = parse_double(key, value);
    else if (key == "volume.L") cfg.L = static_cast<int>(parse_int(key, value));
    else if (key == "volume.boundary") cfg.boundary = value;
    else if (key == "volume.dim_cap") cfg.dim_cap = parse_int(key, value);
    else if (key == "field.b") cfg.b_field = parse_double_list(key, value);
    else if (key == "physics.n") cfg.n = static_cast<int>(parse_int(key, value));
    else if (key == "physics.fermi_energy")
      cfg.fermi_energy = parse_double(key, value);
    else if (key == "disorder.lambda") cfg.lambda = parse_double(key, value);
    else if (key == "disorder.seeds") {
      cfg.seeds.clear();
      for (const std::string& s : split_list(value))
        cfg.seeds.push_back(parse_uint(key, s));
    } else if (key == "disorder.seed0") cfg.seed0 = parse_uint(key, value);
    else if (key == "disorder.count")
      cfg.seed_count = static_cast<int>(parse_int(key, value));
    else if (key == "scheme.kind") cfg.scheme = value;
    else if (key == "core.fraction") cfg.core_fraction = parse_double(key, value);
    else if (key == "kspace.grid") cfg.grid = static_cast<int>(parse_int(key, value));
    else if (key == "kspace.method") cfg.kspace_method = value;
    else if (key == "index.radii") cfg.radii = parse_double_list(key, value);
    else if (key == "index.x0") cfg.x0 = parse_double_list(key, value);
    else if (key == "index.insertion") cfg.insertion = value;
    else if (key == "fracmom.s") cfg.s_exponent = parse_double(key, value);
    else if (key == "fracmom.delta") cfg.delta_imag = parse_double(key, value);
    else if (key == "fracmom.distances") {
      cfg.distances.clear();
      for (const std::string& s : split_list(value))
        cfg.distances.push_back(static_cast<int>(parse_int(key, s)));
    } else if (key == "sobolev.deltas")
      cfg.deltas_h = parse_double_list(key, value);
    else if (key == "sobolev.direction_seed")
      cfg.direction_seed = parse_uint(key, value);
    else if (key == "identity.lemma")
      cfg.lemma = static_cast<int>(parse_int(key, value));
    else if (key == "identity.trials")
      cfg.trials = static_cast<int>(parse_int(key, value));
    else if (key == "identity.rmax")
      cfg.rmax = static_cast<int>(parse_int(key, value));
    else if (key == "phase.m_values") cfg.m_values = parse_double_list(key, value);
    else if (key == "phase.lambda_values")
      cfg.lambda_values = parse_double_list(key, value);
    else if (key == "phase.mass_param") cfg.mass_param = value;
    else if (key == "output.path") cfg.output = value;
    else if (key == "output.format") cfg.format = value;
    else if (key == "run.workers")
      cfg.workers = static_cast<int>(parse_int(key, value));
    else
      throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("JSON config: ") + e.what());
    }
    return config_from_json(j);
  }

  ExperimentConfig cfg;
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream lines(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!section.empty() && key.find('.') == std::string::npos)
      key = section + "." + key;
    try {
      kv.clear();
      kv.emplace_back(key, value);
      apply_flat_entries(cfg, kv);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  ojson j;
  j["command"] = cfg.command;
  j["model"] = {{"name", cfg.model}, {"params", ojson::object()}};
  for (const auto& [k, v] : cfg.model_params) j["model"]["params"][k] = v;
  j["volume"] = {{"L", cfg.L},
                 {"boundary", cfg.boundary},
                 {"dim_cap", cfg.dim_cap}};
  j["field"] = {{"b", cfg.b_field}};
  j["physics"] = {{"n", cfg.n}, {"fermi_energy", cfg.fermi_energy}};
  j["disorder"] = {{"lambda", cfg.lambda},
                   {"seeds", cfg.seeds},
                   {"seed0", cfg.seed0},
                   {"count", cfg.seed_count}};
  j["scheme"] = {{"kind", cfg.scheme}};
  j["core"] = {{"fraction", cfg.core_fraction}};
  j["kspace"] = {{"grid", cfg.grid}, {"method", cfg.kspace_method}};
  j["index"] = {{"radii", cfg.radii},
                {"x0", cfg.x0},
                {"insertion", cfg.insertion}};
  j["fracmom"] = {{"s", cfg.s_exponent},
                  {"delta", cfg.delta_imag},
                  {"distances", cfg.distances}};
  j["sobolev"] = {{"deltas", cfg.deltas_h},
                  {"direction_seed", cfg.direction_seed}};
  j["identity"] = {{"lemma", cfg.lemma},
                   {"trials", cfg.trials},
                   {"rmax", cfg.rmax}};
  j["phase"] = {{"m_values", cfg.m_values},
                {"lambda_values", cfg.lambda_values},
                {"mass_param", cfg.mass_param}};
  j["output"] = {{"path", cfg.output}, {"format", cfg.format}};
  j["run"] = {{"workers", cfg.workers}};
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("command")) cfg.command = j["command"].get<std::string>();
    if (j.contains("model")) {
      const auto& m = j["model"];
      if (m.contains("name")) cfg.model = m["name"].get<std::string>();
      if (m.contains("params"))
        for (const auto& [k, v] : m["params"].items())
          cfg.model_params[k] = v.get<double>();
    }
    if (j.contains("volume")) {
      const auto& v = j["volume"];
      if (v.contains("L")) cfg.L = v["L"].get<int>();
      if (v.contains("boundary")) cfg.boundary = v["boundary"].get<std::string>();
      if (v.contains("dim_cap")) cfg.dim_cap = v["dim_cap"].get<std::int64_t>();
    }
    if (j.contains("field") && j["field"].contains("b"))
      cfg.b_field = j["field"]["b"].get<std::vector<double>>();
    if (j.contains("physics")) {
      const auto& p = j["physics"];
      if (p.contains("n")) cfg.n = p["n"].get<int>();
      if (p.contains("fermi_energy"))
        cfg.fermi_energy = p["fermi_energy"].get<double>();
    }
    if (j.contains("disorder")) {
      const auto& d = j["disorder"];
      if (d.contains("lambda")) cfg.lambda = d["lambda"].get<double>();
      if (d.contains("seeds"))
        cfg.seeds = d["seeds"].get<std::vector<std::uint64_t>>();
      if (d.contains("seed0")) cfg.seed0 = d["seed0"].get<std::uint64_t>();
      if (d.contains("count")) cfg.seed_count = d["count"].get<int>();
    }
    if (j.contains("scheme") && j["scheme"].contains("kind"))
      cfg.scheme = j["scheme"]["kind"].get<std::string>();
    if (j.contains("core") && j["core"].contains("fraction"))
      cfg.core_fraction = j["core"]["fraction"].get<double>();
    if (j.contains("kspace")) {
      const auto& k = j["kspace"];
      if (k.contains("grid")) cfg.grid = k["grid"].get<int>();
      if (k.contains("method")) cfg.kspace_method = k["method"].get<std::string>();
    }
    if (j.contains("index")) {
      const auto& ix = j["index"];
      if (ix.contains("radii")) cfg.radii = ix["radii"].get<std::vector<double>>();
      if (ix.contains("x0")) cfg.x0 = ix["x0"].get<std::vector<double>>();
      if (ix.contains("insertion"))
        cfg.insertion = ix["insertion"].get<std::string>();
    }
    if (j.contains("fracmom")) {
      const auto& f = j["fracmom"];
      if (f.contains("s")) cfg.s_exponent = f["s"].get<double>();
      if (f.contains("delta")) cfg.delta_imag = f["delta"].get<double>();
      if (f.contains("distances"))
        cfg.distances = f["distances"].get<std::vector<int>>();
    }
    if (j.contains("sobolev")) {
      const auto& s = j["sobolev"];
      if (s.contains("deltas")) cfg.deltas_h = s["deltas"].get<std::vector<double>>();
      if (s.contains("direction_seed"))
        cfg.direction_seed = s["direction_seed"].get<std::uint64_t>();
    }
    if (j.contains("identity")) {
      const auto& id = j["identity"];
      if (id.contains("lemma")) cfg.lemma = id["lemma"].get<int>();
      if (id.contains("trials")) cfg.trials = id["trials"].get<int>();
      if (id.contains("rmax")) cfg.rmax = id["rmax"].get<int>();
    }
    if (j.contains("phase")) {
      const auto& p = j["phase"];
      if (p.contains("m_values"))
        cfg.m_values = p["m_values"].get<std::vector<double>>();
      if (p.contains("lambda_values"))
        cfg.lambda_values = p["lambda_values"].get<std::vector<double>>();
      if (p.contains("mass_param"))
        cfg.mass_param = p["mass_param"].get<std::string>();
    }
    if (j.contains("output")) {
      const auto& o = j["output"];
      if (o.contains("path")) cfg.output = o["path"].get<std::string>();
      if (o.contains("format")) cfg.format = o["format"].get<std::string>();
    }
    if (j.contains("run") && j["run"].contains("workers"))
      cfg.workers = j["run"]["workers"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("JSON config: ") + e.what());
  }
  return cfg;
}

std::vector<std::uint64_t> resolve_seeds(const ExperimentConfig& cfg) {
  if (!cfg.seeds.empty()) return cfg.seeds;
  std::vector<std::uint64_t> out;
  const int count = cfg.seed_count > 0 ? cfg.seed_count : 1;
  for (int i = 0; i < count; ++i) out.push_back(cfg.seed0 + std::uint64_t(i));
  return out;
}

int exit_code_for(const std::string& kind) {
  if (kind == "config") return 2;
  if (kind == "dimension") return 3;
  if (kind == "geometry") return 4;
  if (kind == "flux") return 5;
  if (kind == "gap") return 6;
  if (kind == "lookup") return 7;
  if (kind == "precision") return 8;
  if (kind == "resource") return 9;
  if (kind == "scheme") return 10;
  return 1;
}

namespace {

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Boundary parse_boundary(const std::string& b) {
  if (b == "open") return Boundary::Open;
  if (b == "periodic") return Boundary::Periodic;
  throw ConfigError("boundary must be 'open' or 'periodic', got '" + b + "'");
}

KspaceMethod parse_kspace_method(const std::string& m) {
  if (m == "auto") return KspaceMethod::Auto;
  if (m == "plaquette") return KspaceMethod::Plaquette;
  if (m == "central-diff") return KspaceMethod::CentralDiff;
  if (m == "analytic") return KspaceMethod::Analytic;
  throw ConfigError("unknown momentum method '" + m + "'");
}

DiracInsertion parse_insertion(const std::string& s) {
  if (s == "symmetric") return DiracInsertion::SymmetricSum;
  if (s == "gamma1") return DiracInsertion::FirstGenerator;
  throw ConfigError("insertion must be 'symmetric' or 'gamma1'");
}

struct Workbench {
  HoppingModel model;
  FiniteVolume vol;
  MagneticField B;
  DerivationScheme scheme;
  std::vector<std::uint64_t> seeds;
  int workers = 1;
};

Workbench make_workbench(const ExperimentConfig& cfg, bool with_volume) {
  Workbench wb;
  wb.model = model_zoo(cfg.model, cfg.model_params);
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  if (wb.model.d != 2 * cfg.n)
    throw DimensionError("model '" + cfg.model + "' lives in d=" +
                         std::to_string(wb.model.d) + ", configured n=" +
                         std::to_string(cfg.n) + " needs d=2n");
  if (with_volume) {
    wb.vol = make_volume(wb.model.d, cfg.L, wb.model.Q,
                         parse_boundary(cfg.boundary));
    wb.vol.dim_cap = cfg.dim_cap;
    wb.vol.check_dim(wb.vol.dofs(), "Hamiltonian");
    wb.scheme = cfg.scheme == "auto" ? scheme_for(wb.vol)
                                     : parse_scheme(cfg.scheme, wb.vol.L);
  }
  wb.B = cfg.b_field.empty() ? MagneticField::zero(wb.model.d)
                             : MagneticField::from_upper(wb.model.d, cfg.b_field);
  wb.seeds = resolve_seeds(cfg);
  wb.workers = cfg.workers > 0 ? cfg.workers : default_workers();
  return wb;
}

// stops at 0.8 rmax: sites within a hop of the open edge spoil the fit
std::vector<double> default_radii(int L) {
  const double rmax = (L - 1) / 2;
  std::vector<double> out;
  for (double f : {0.45, 0.6, 0.8}) {
    const double r = std::floor(rmax * f);
    if (out.empty() || r > out.back() + 0.5) out.push_back(r);
  }
  return out;
}

std::vector<int> default_distances(int L) {
  std::vector<int> out;
  const int rmax = (L - 1) / 2;
  for (int r = 2; r <= std::min(8, rmax); ++r) out.push_back(r);
  return out;
}

ojson chern_json(const ChernEstimate& est) {
  ojson r;
  r["value"] = est.value;
  r["n"] = est.n;
  r["method"] = est.method;
  if (est.method == "kspace") r["grid"] = est.grid;
  if (est.method == "realspace") r["L"] = est.L;
  r["realizations"] = est.realizations;
  r["std_error"] = est.std_error;
  r["imag_part"] = est.imag_part;
  r["core_sensitivity"] = est.core_sensitivity;
  r["degenerate_warning"] = est.degenerate_warning;
  r["per_seed"] = est.per_seed;
  return r;
}

ojson run_kspace(const ExperimentConfig& cfg) {
  const Workbench wb = make_workbench(cfg, false);
  if (!wb.B.is_zero())
    throw ConfigError("momentum sums need a clean (B=0) model");
  const ChernEstimate est =
      kspace_chern(wb.model, cfg.fermi_energy, cfg.n, cfg.grid,
                   parse_kspace_method(cfg.kspace_method));
  return chern_json(est);
}

ojson run_realspace(const ExperimentConfig& cfg) {
  const Workbench wb = make_workbench(cfg, true);
  const ChernEstimate est = disorder_averaged_chern(
      wb.model, wb.vol, wb.B, cfg.lambda, cfg.fermi_energy, cfg.n, wb.seeds,
      wb.scheme, cfg.core_fraction, wb.workers);
  ojson r = chern_json(est);
  r["scheme"] = scheme_name(wb.scheme);
  r["core_fraction"] = cfg.core_fraction;
  r["lambda"] = cfg.lambda;
  return r;
}

ojson run_index(const ExperimentConfig& cfg) {
  const Workbench wb = make_workbench(cfg, true);
  const CliffordRep rep = build_clifford(cfg.n);
  RVector x0 = RVector::Zero(wb.vol.d);
  if (!cfg.x0.empty()) {
    if (static_cast<int>(cfg.x0.size()) != wb.vol.d)
      throw ConfigError("x0 needs 2n entries");
    for (int i = 0; i < wb.vol.d; ++i) x0[i] = cfg.x0[static_cast<std::size_t>(i)];
  }
  const std::vector<double> radii =
      cfg.radii.empty() ? default_radii(cfg.L) : cfg.radii;
  const DiracInsertion ins = parse_insertion(cfg.insertion);

  std::vector<IndexEstimate> slots(wb.seeds.size());
  parallel_for(wb.seeds.size(), wb.workers, [&](std::size_t i) {
    const DisorderRealization dis =
        sample_disorder(wb.vol, wb.model, cfg.lambda, wb.seeds[i]);
    const Matrix H = build_hamiltonian(wb.model, wb.vol, wb.B, dis);
    const FermiProjector fp = fermi_projector(H, cfg.fermi_energy);
    slots[i] = index_estimate(fp, wb.vol, rep, x0, radii, ins);
  });

  ojson rows = ojson::array();
  bool all_equal = true;
  bool all_converged = true;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const IndexEstimate& e = slots[i];
    rows.push_back({{"seed", wb.seeds[i]},
                    {"radii", e.radii},
                    {"values", e.values},
                    {"extrapolated", e.extrapolated},
                    {"integer", e.nearest_integer},
                    {"distance", e.distance},
                    {"converged", e.converged},
                    {"imag_part", e.imag_part}});
    all_equal = all_equal && e.nearest_integer == slots[0].nearest_integer;
    all_converged = all_converged && e.converged;
  }
  ojson r;
  r["rows"] = rows;
  r["all_equal"] = all_equal;
  r["all_converged"] = all_converged;
  if (all_equal && all_converged) r["integer"] = slots[0].nearest_integer;
  r["insertion"] = cfg.insertion;
  return r;
}

ojson fracmom_rows(const ExperimentConfig& cfg, const Workbench& wb,
                   const std::vector<int>& distances) {
  const std::vector<double> lambdas =
      cfg.lambda_values.empty() ? std::vector<double>{cfg.lambda}
                                : cfg.lambda_values;
  ojson rows = ojson::array();
  for (double lam : lambdas) {
    const FracMomentFit fit = fractional_moment_fit(
        wb.model, wb.vol, wb.B, lam, cfg.fermi_energy, cfg.s_exponent,
        cfg.delta_imag, wb.seeds, distances, wb.workers);
    rows.push_back({{"lambda", lam},
                    {"fermi_energy", cfg.fermi_energy},
                    {"s", fit.s},
                    {"beta", json_rate(fit.beta)},
                    {"C_s", fit.C_s},
                    {"residual", fit.residual},
                    {"decay_tstat", fit.decay_tstat},
                    {"delocalized", fit.delocalized},
                    {"exact_zero", fit.exact_zero},
                    {"distances", fit.distances},
                    {"moments", fit.moments}});
  }
  return rows;
}

std::string fracmom_csv(const ojson& rows) {
  std::string out =
      "lambda,fermi_energy,s,beta,C_s,residual,decay_tstat,delocalized\n";
  for (const auto& row : rows) {
    const double beta = row["beta"].is_string()
                            ? std::numeric_limits<double>::infinity()
                            : row["beta"].get<double>();
    out += fmt(row["lambda"].get<double>()) + "," +
           fmt(row["fermi_energy"].get<double>()) + "," +
           fmt(row["s"].get<double>()) + "," + fmt(beta) + "," +
           fmt(row["C_s"].get<double>()) + "," +
           fmt(row["residual"].get<double>()) + "," +
           fmt(row["decay_tstat"].get<double>()) + "," +
           (row["delocalized"].get<bool>() ? "1" : "0") + "\n";
  }
  return out;
}

ojson run_sobolev(const ExperimentConfig& cfg) {
  const Workbench wb = make_workbench(cfg, true);
  const std::vector<double> deltas =
      cfg.deltas_h.empty() ? std::vector<double>{0.2, 0.1, 0.05, 0.02}
                           : cfg.deltas_h;
  const SobolevTable table = sobolev_continuity(
      wb.model, wb.vol, wb.B, cfg.lambda, cfg.fermi_energy, deltas, cfg.n,
      wb.seeds, wb.scheme, cfg.core_fraction, cfg.direction_seed, wb.workers);
  ojson rows = ojson::array();
  for (const SobolevRow& row : table.rows)
    rows.push_back({{"delta_h", row.delta_h},
                    {"norm", row.norm},
                    {"crossing", row.crossing}});
  ojson r;
  r["rows"] = rows;
  r["loglog_slope"] = table.loglog_slope;
  return r;
}

ojson run_verify_identity(const ExperimentConfig& cfg) {
  const CliffordRep rep = build_clifford(cfg.n);
  ojson r;
  if (cfg.lemma == 3) {
    const double tol = cfg.n == 1 ? 0.01 : 0.05;
    const double det_floor = cfg.n == 1 ? 0.8 : 1.0;
    ojson rows = ojson::array();
    double max_rel = 0.0;
    bool all_pass = true;
    for (int t = 0; t < cfg.trials; ++t) {
      std::vector<RVector> pts;
      for (int attempt = 0;; ++attempt) {
        pts.clear();
        for (int i = 0; i < 2 * cfg.n; ++i) {
          RVector p(2 * cfg.n);
          for (int j = 0; j < 2 * cfg.n; ++j)
            p[j] = 4.0 * rng::to_unit(rng::keyed(
                             cfg.seed0, {std::uint64_t(t), std::uint64_t(attempt),
                                         std::uint64_t(i), std::uint64_t(j)})) -
                   2.0;
          pts.push_back(p);
        }
        Eigen::MatrixXd M(2 * cfg.n, 2 * cfg.n);
        for (int i = 0; i < 2 * cfg.n; ++i) M.row(i) = pts[static_cast<std::size_t>(i)];
        if (std::abs(M.determinant()) >= det_floor) break;
        if (attempt > 200)
          throw PrecisionError("could not draw a well-conditioned point set");
      }
      const cxd rhs = lemma3_rhs(rep, pts);
      const QuadratureResult lhs = lemma3_lhs(rep, pts);
      const double rel = std::abs(lhs.value - rhs) / std::abs(rhs);
      max_rel = std::max(max_rel, rel);
      const bool pass = rel <= tol;
      all_pass = all_pass && pass;
      rows.push_back({{"trial", t},
                      {"lhs_re", lhs.value.real()},
                      {"lhs_im", lhs.value.imag()},
                      {"rhs_re", rhs.real()},
                      {"rhs_im", rhs.imag()},
                      {"rel_error", rel},
                      {"quad_error", lhs.error_estimate},
                      {"evaluations", lhs.evaluations},
                      {"pass", pass}});
    }
    r["lemma"] = 3;
    r["n"] = cfg.n;
    r["tolerance"] = tol;
    r["rows"] = rows;
    r["max_rel_error"] = max_rel;
    r["pass"] = all_pass;
    return r;
  }
  if (cfg.lemma == 5) {
    const int d = 2 * cfg.n;
    const double sphere = d == 2 ? 2.0 * kPi : 2.0 * kPi * kPi;
    auto unit_phi = [](const RVector&) { return 1.0; };
    auto odd_phi = [](const RVector& xhat) { return xhat[0]; };
    auto const_f = [](const IVec&) { return 1.0; };
    auto random_f = [&cfg](const IVec& x) {
      std::uint64_t h = rng::splitmix64(cfg.seed0);
      for (int c : x)
        h = rng::splitmix64(
            h ^ static_cast<std::uint64_t>(std::int64_t(c) + (1 << 20)));
      return rng::to_unit(h);
    };
    struct Case {
      const char* name;
      std::function<double(const IVec&)> f;
      std::function<double(const RVector&)> phi;
      double expected;
      double tol;
      bool relative;
    };
    const std::vector<Case> cases = {
        {"constant", const_f, unit_phi, sphere / (2.0 * cfg.n), 0.05, true},
        {"odd-phi", const_f, odd_phi, 0.0, 0.02, false},
        {"random-f", random_f, unit_phi, 0.5 * sphere / (2.0 * cfg.n), 0.05,
         true}};
    ojson rows = ojson::array();
    bool all_pass = true;
    for (const Case& c : cases) {
      const DixmierEstimate est = dixmier_estimate(c.f, c.phi, cfg.n, cfg.rmax);
      const double err = std::abs(est.limit - c.expected);
      const bool pass =
          c.relative ? err <= c.tol * std::abs(c.expected) : err <= c.tol;
      all_pass = all_pass && pass;
      rows.push_back({{"case", c.name},
                      {"limit", est.limit},
                      {"expected", c.expected},
                      {"checkpoints", est.checkpoints},
                      {"ratios", est.ratios},
                      {"pass", pass}});
    }
    r["lemma"] = 5;
    r["n"] = cfg.n;
    r["rmax"] = cfg.rmax;
    r["rows"] = rows;
    r["pass"] = all_pass;
    return r;
  }
  throw ConfigError("verify-identity supports lemma 3 or 5");
}

ojson run_phase_diagram(const ExperimentConfig& cfg) {
  if (cfg.m_values.empty())
    throw ConfigError("phase diagram needs phase.m_values");
  const std::vector<double> lambdas =
      cfg.lambda_values.empty() ? std::vector<double>{cfg.lambda}
                                : cfg.lambda_values;
  // probe model fixes d and Q for the volume
  ExperimentConfig probe_cfg = cfg;
  probe_cfg.model_params[cfg.mass_param] = cfg.m_values.front();
  const Workbench wb = make_workbench(probe_cfg, true);

  std::vector<PhasePoint> grid;
  for (double m : cfg.m_values)
    for (double lam : lambdas) grid.push_back({m, lam});

  EnsembleSettings settings;
  settings.vol = wb.vol;
  settings.B = wb.B;
  settings.fermi_energy = cfg.fermi_energy;
  settings.n = cfg.n;
  settings.seeds = wb.seeds;
  settings.scheme = wb.scheme;
  settings.core_fraction = cfg.core_fraction;
  settings.workers = wb.workers;
  settings.mass_param = cfg.mass_param;

  const std::vector<PhaseRow> rows = phase_diagram(cfg.model, grid, settings);
  ojson out = ojson::array();
  for (const PhaseRow& row : rows) {
    ojson jr;
    jr["m"] = row.m;
    jr["lambda"] = row.lambda;
    jr["ok"] = row.ok;
    jr["value"] = row.ok ? ojson(row.est.value) : ojson(nullptr);
    jr["std_error"] = row.est.std_error;
    jr["realizations"] = row.est.realizations;
    jr["error"] = row.error;
    out.push_back(jr);
  }
  return out;
}

std::string phase_csv(const ojson& rows) {
  std::string out = "m,lambda,value,std_error,realizations,ok,error\n";
  for (const auto& row : rows) {
    out += fmt(row["m"].get<double>()) + "," +
           fmt(row["lambda"].get<double>()) + ",";
    out += row["value"].is_null() ? "" : fmt(row["value"].get<double>());
    out += "," + fmt(row["std_error"].get<double>()) + "," +
           std::to_string(row["realizations"].get<int>()) + "," +
           (row["ok"].get<bool>() ? "1" : "0") + "," +
           csv_escape(row["error"].get<std::string>()) + "\n";
  }
  return out;
}

void write_payload(const ExperimentConfig& cfg, const std::string& payload,
                   std::ostream& console) {
  if (cfg.output.empty()) {
    console << payload;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw ResourceError("cannot write output file '" + cfg.output + "'");
  out << payload;
  if (!out) throw ResourceError("write failed for '" + cfg.output + "'");
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, std::ostream& console) {
  const std::string& cmd = cfg.command;
  std::string format = cfg.format;
  if (format.empty())
    format = (cmd == "phase-diagram" || cmd == "localization") ? "csv" : "json";
  if (format != "json" && format != "csv")
    throw ConfigError("format must be 'json' or 'csv'");

  ojson result;
  std::string csv;
  if (cmd == "kspace") {
    result = run_kspace(cfg);
  } else if (cmd == "realspace") {
    result = run_realspace(cfg);
  } else if (cmd == "index") {
    result = run_index(cfg);
  } else if (cmd == "localization") {
    const Workbench wb = make_workbench(cfg, true);
    const std::vector<int> distances =
        cfg.distances.empty() ? default_distances(cfg.L) : cfg.distances;
    const ojson rows = fracmom_rows(cfg, wb, distances);
    result = ojson{{"rows", rows}};
    csv = fracmom_csv(rows);
  } else if (cmd == "verify-identity") {
    result = run_verify_identity(cfg);
  } else if (cmd == "phase-diagram") {
    const ojson rows = run_phase_diagram(cfg);
    result = ojson{{"rows", rows}};
    csv = phase_csv(rows);
  } else if (cmd == "sobolev") {
    result = run_sobolev(cfg);
  } else if (cmd.empty()) {
    throw ConfigError("no command given (set one on the command line or in "
                      "the config file)");
  } else {
    throw ConfigError("unknown command '" + cmd + "'");
  }

  std::string payload;
  if (format == "csv") {
    if (csv.empty())
      throw ConfigError("command '" + cmd + "' has no CSV form; use json");
    payload = "# ncchern schema_version=" + std::to_string(kSchemaVersion) +
              "\n" + csv;
  } else {
    ojson envelope;
    envelope["schema_version"] = kSchemaVersion;
    envelope["tool_version"] = kToolVersion;
    envelope["timestamp"] = timestamp_utc();
    envelope["config"] = config_to_json(cfg);
    envelope["result"] = result;
    payload = envelope.dump(2) + "\n";
  }
  write_payload(cfg, payload, console);
}

}  // namespace ncchern
