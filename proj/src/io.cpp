#include "ctdvp/io.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ctdvp/oracle.hpp"
#include "ctdvp/rng.hpp"

namespace ctdvp::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config key '" + key + "': " + what);
}

void check_keys(const json& j, const std::string& scope, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.contains(key))
      config_error(scope.empty() ? key : scope + "." + key, "unknown key");
  }
}

double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) config_error(key, "expected a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) config_error(key, "expected an integer");
  return j.at(key).get<int>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) config_error(key, "expected a boolean");
  return j.at(key).get<bool>();
}

std::vector<int> parse_initial_state(const std::string& text, int n) {
  std::vector<int> bits;
  if (text == "zeros") {
    bits.assign(static_cast<std::size_t>(n), 0);
  } else if (text == "neel") {
    for (int j = 0; j < n; ++j) bits.push_back(j % 2);
  } else {
    if (static_cast<int>(text.size()) != n)
      config_error("initial_state", "bit pattern length must equal n");
    for (char c : text) {
      if (c != '0' && c != '1') config_error("initial_state", "expected only '0'/'1'");
      bits.push_back(c - '0');
    }
  }
  return bits;
}

ObservableSpec parse_observable(const json& j, int n, std::size_t index) {
  const std::string scope = "observables[" + std::to_string(index) + "]";
  if (!j.is_object()) config_error(scope, "expected an object");
  check_keys(j, scope, {"type", "op", "site", "label", "name"});
  if (!j.contains("type") || !j.at("type").is_string()) config_error(scope + ".type", "required string");
  const std::string type = j.at("type").get<std::string>();
  ObservableSpec spec;
  if (type == "site_average") {
    spec.mode = ObservableSpec::Mode::site_average;
    const std::string op = j.value("op", std::string("Z"));
    if (op.size() != 1) config_error(scope + ".op", "expected one of X/Y/Z");
    spec.site_op = op[0];
    spec.name = j.value("name", "avg_s" + std::string(1, static_cast<char>(std::tolower(spec.site_op))));
  } else if (type == "site") {
    spec.mode = ObservableSpec::Mode::single;
    if (!j.contains("site")) config_error(scope + ".site", "required");
    const int site = j.at("site").get<int>();
    if (site < 0 || site >= n) config_error(scope + ".site", "out of range");
    const std::string op = j.value("op", std::string("Z"));
    if (op.size() != 1 || (op[0] != 'X' && op[0] != 'Y' && op[0] != 'Z'))
      config_error(scope + ".op", "expected one of X/Y/Z");
    spec.pauli = PauliString::single_site(n, site, op[0]);
    spec.name = j.value("name", "s" + std::string(1, static_cast<char>(std::tolower(op[0]))) + "_" +
                                    std::to_string(site));
  } else if (type == "single") {
    spec.mode = ObservableSpec::Mode::single;
    if (!j.contains("label") || !j.at("label").is_string())
      config_error(scope + ".label", "required string");
    try {
      spec.pauli = PauliString::from_labels(j.at("label").get<std::string>());
    } catch (const std::invalid_argument& e) {
      config_error(scope + ".label", e.what());
    }
    if (spec.pauli.n_qubits() != n) config_error(scope + ".label", "length must equal n");
    spec.name = j.value("name", "pauli_" + std::to_string(index));
  } else {
    config_error(scope + ".type", "expected site_average/site/single");
  }
  return spec;
}

}  // namespace

EvolutionConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  check_keys(j, "", {"n", "model", "chi_max", "svd_cutoff", "dt", "t_final", "cool_every",
                     "d_layers", "initial_state", "observables", "rng_seed", "oracle_compare",
                     "tie_tolerance", "entropy_floor", "record_entropy_profile", "krylov"});
  EvolutionConfig c;
  if (!j.contains("n")) config_error("n", "required");
  c.n = get_int(j, "n", 0);
  if (c.n < 2) config_error("n", "must be at least 2");

  if (!j.contains("model") || !j.at("model").is_object()) config_error("model", "required object");
  const json& m = j.at("model");
  check_keys(m, "model", {"j1x", "j1y", "j2x", "h"});
  c.model.j1x = get_number(m, "j1x", 0.0);
  c.model.j1y = get_number(m, "j1y", 0.0);
  c.model.j2x = get_number(m, "j2x", 0.0);
  c.model.h = get_number(m, "h", 0.0);

  c.chi_max = get_int(j, "chi_max", 128);
  c.svd_cutoff = get_number(j, "svd_cutoff", 0.0);
  c.dt = get_number(j, "dt", 0.05);
  c.t_final = get_number(j, "t_final", 8.0);
  c.cool_every = get_int(j, "cool_every", 10);
  c.d_layers = get_int(j, "d_layers", 1);
  if (j.contains("rng_seed")) {
    if (!j.at("rng_seed").is_number_unsigned() && !j.at("rng_seed").is_number_integer())
      config_error("rng_seed", "expected an integer");
    c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  }
  c.oracle_compare = get_bool(j, "oracle_compare", false);
  c.tie_tolerance = get_number(j, "tie_tolerance", 1e-12);
  c.entropy_floor = get_number(j, "entropy_floor", 1e-14);
  c.record_entropy_profile = get_bool(j, "record_entropy_profile", false);

  std::string initial = "zeros";
  if (j.contains("initial_state")) {
    if (!j.at("initial_state").is_string()) config_error("initial_state", "expected a string");
    initial = j.at("initial_state").get<std::string>();
  }
  c.initial_bits = parse_initial_state(initial, c.n);

  if (j.contains("observables")) {
    if (!j.at("observables").is_array()) config_error("observables", "expected an array");
    const json& arr = j.at("observables");
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.observables.push_back(parse_observable(arr[i], c.n, i));
  }

  if (j.contains("krylov")) {
    const json& k = j.at("krylov");
    check_keys(k, "krylov", {"tolerance", "max_dim", "min_dim"});
    c.krylov.tolerance = get_number(k, "tolerance", c.krylov.tolerance);
    c.krylov.max_dim = get_int(k, "max_dim", c.krylov.max_dim);
    c.krylov.min_dim = get_int(k, "min_dim", c.krylov.min_dim);
  }

  c.validate();
  return c;
}

json config_to_json(const EvolutionConfig& c) {
  json j;
  j["n"] = c.n;
  j["model"] = {{"j1x", c.model.j1x}, {"j1y", c.model.j1y}, {"j2x", c.model.j2x}, {"h", c.model.h}};
  j["chi_max"] = c.chi_max;
  j["svd_cutoff"] = c.svd_cutoff;
  j["dt"] = c.dt;
  j["t_final"] = c.t_final;
  j["cool_every"] = c.cool_every;
  j["d_layers"] = c.d_layers;
  std::string bits;
  for (int b : c.initial_bits) bits.push_back(static_cast<char>('0' + b));
  j["initial_state"] = bits;
  json obs = json::array();
  for (const ObservableSpec& o : c.observables) {
    json e;
    if (o.mode == ObservableSpec::Mode::site_average) {
      e["type"] = "site_average";
      e["op"] = std::string(1, o.site_op);
    } else {
      e["type"] = "single";
      e["label"] = o.pauli.labels();
    }
    e["name"] = o.name;
    obs.push_back(e);
  }
  j["observables"] = obs;
  j["rng_seed"] = c.rng_seed;
  j["oracle_compare"] = c.oracle_compare;
  j["tie_tolerance"] = c.tie_tolerance;
  j["entropy_floor"] = c.entropy_floor;
  j["record_entropy_profile"] = c.record_entropy_profile;
  j["krylov"] = {{"tolerance", c.krylov.tolerance},
                 {"max_dim", c.krylov.max_dim},
                 {"min_dim", c.krylov.min_dim}};
  return j;
}

EvolutionConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

int Series::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> Series::column_values(int idx) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[static_cast<std::size_t>(idx)]);
  return out;
}

Series read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Series s;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!have_header) {
      s.columns = fields;
      have_header = true;
      continue;
    }
    char* end = nullptr;
    const double first = std::strtod(fields[0].c_str(), &end);
    if (end == fields[0].c_str()) {  // footer row, e.g. epsilon_T
      std::vector<double> vals;
      for (std::size_t i = 1; i < fields.size(); ++i) vals.push_back(std::stod(fields[i]));
      s.footers.emplace_back(fields[0], std::move(vals));
      continue;
    }
    std::vector<double> row;
    row.push_back(first);
    for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(std::stod(fields[i]));
    s.rows.push_back(std::move(row));
  }
  if (!have_header) throw std::invalid_argument("empty csv: " + path);
  return s;
}

namespace {

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& traj) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "# trajectory-csv v" << kCsvSchema << " entropy_log=ln\n";
  out << "step,t";
  for (const std::string& name : traj.observable_names) out << "," << name;
  out << ",entropy_mid,max_chi,discarded_cum,energy,cooled,wall_ms\n";
  for (const StepRecord& r : traj.steps) {
    out << r.step << "," << fmt17(r.t);
    for (double v : r.observables) out << "," << fmt17(v);
    out << "," << fmt17(r.entropy_mid) << "," << r.max_chi << "," << fmt17(r.discarded_cum) << ","
        << fmt17(r.energy) << "," << (r.cooled ? 1 : 0) << "," << fmt17(r.wall_ms) << "\n";
  }
}

void write_entropy_profile_csv(const std::string& path, const TrajectoryRecord& traj, int n) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "# entropy-profile-csv v" << kCsvSchema << " entropy_log=ln\n";
  out << "step,t";
  for (int b = 0; b + 1 < n; ++b) out << ",S_" << b;
  out << "\n";
  for (const StepRecord& r : traj.steps) {
    out << r.step << "," << fmt17(r.t);
    for (double v : r.entropy_profile) out << "," << fmt17(v);
    out << "\n";
  }
}

void write_cooling_jsonl(const std::string& path, const TrajectoryRecord& traj) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const GateRecord& g : traj.cooling_gates) {
    json line = {{"type", "gate"},
                 {"step", g.step},
                 {"layer", g.layer},
                 {"bond", g.bond},
                 {"candidate", g.candidate_id},
                 {"sign_pauli", g.sign_pauli_id},
                 {"entropy_before", g.entropy_before},
                 {"entropy_after", g.entropy_after},
                 {"discarded", g.discarded_weight},
                 {"skipped", g.skipped}};
    out << line.dump() << "\n";
  }
  for (const TrajectoryRecord::TableauLogEntry& e : traj.tableau_log) {
    json line = {{"type", "tableau"},
                 {"step", e.step},
                 {"invocation", e.invocation_hex},
                 {"accumulated", e.accumulated_hex}};
    out << line.dump() << "\n";
  }
}

void write_exact_csv(const std::string& path, const std::vector<std::string>& names,
                     const std::vector<double>& times,
                     const std::vector<std::vector<double>>& values) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "# exact-csv v" << kCsvSchema << "\n";
  out << "step,t";
  for (const std::string& n : names) out << "," << n;
  out << "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << i << "," << fmt17(times[i]);
    for (const auto& col : values) out << "," << fmt17(col[i]);
    out << "\n";
  }
}

}  // namespace

ComparisonResult compare_series(const Series& a, const Series& b) {
  const int ta = a.column("t"), tb = b.column("t");
  if (ta < 0 || tb < 0) throw std::invalid_argument("compare: missing t column");
  if (a.rows.size() != b.rows.size())
    throw std::invalid_argument("compare: grids differ in length (" +
                                std::to_string(a.rows.size()) + " vs " +
                                std::to_string(b.rows.size()) + ")");
  const std::vector<double> times = a.column_values(ta);
  const std::vector<double> times_b = b.column_values(tb);
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - times_b[i]) > 1e-9)
      throw std::invalid_argument("compare: time grids differ at row " + std::to_string(i));

  static const std::set<std::string> kNonObservables = {
      "step", "t", "entropy_mid", "max_chi", "discarded_cum", "energy", "cooled", "wall_ms"};
  ComparisonResult result;
  result.times = times;
  for (std::size_t i = 0; i < a.columns.size(); ++i) {
    const std::string& name = a.columns[i];
    if (kNonObservables.contains(name)) continue;
    const int j = b.column(name);
    if (j < 0) continue;
    const ErrorSeries err =
        integrated_error(times, a.column_values(static_cast<int>(i)), b.column_values(j));
    result.names.push_back("eps_" + name);
    result.epsilon.push_back(err.epsilon);
    result.epsilon_T.push_back(err.epsilon_T);
  }
  if (result.names.empty()) throw std::invalid_argument("compare: no shared observable columns");
  return result;
}

void write_error_csv(const std::string& path, const ComparisonResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "# error-csv v" << kCsvSchema << "\n";
  out << "t";
  for (const std::string& n : result.names) out << "," << n;
  out << "\n";
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    out << fmt17(result.times[i]);
    for (const auto& col : result.epsilon) out << "," << fmt17(col[i]);
    out << "\n";
  }
  out << "epsilon_T";
  for (double v : result.epsilon_T) out << "," << fmt17(v);
  out << "\n";
}

nlohmann::json state_dump_json(const MPSState& state) {
  json j;
  j["n_sites"] = state.n_sites();
  j["chi_max"] = state.chi_max();
  j["center"] = state.center();
  json shapes = json::array();
  for (int site = 0; site < state.n_sites(); ++site)
    shapes.push_back({state.tensor(site, 0).rows(), 2, state.tensor(site, 0).cols()});
  j["tensor_shapes"] = shapes;
  json spectra = json::array();
  for (const Eigen::VectorXd& s : state.schmidt_profile()) {
    json bond = json::array();
    for (Eigen::Index i = 0; i < s.size(); ++i) bond.push_back(s(i));
    spectra.push_back(bond);
  }
  j["schmidt_spectra"] = spectra;
  return j;
}

RunManifest run_experiment(const EvolutionConfig& config, const std::string& out_dir,
                           bool dump_final_state) {
  config.validate();
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.config = config_to_json(config);
  manifest.code_version = kCodeVersion;
  manifest.seed = config.rng_seed;
  manifest.rng_algorithm = Rng::algorithm();
  manifest.started_at = iso_timestamp();

  EvolutionResult result = run_dressed_evolution(config);
  for (int i = 0; i < result.trajectory.warnings; ++i)
    manifest.warnings.push_back("local exponential hit max_dim");

  const fs::path dir(out_dir);
  write_trajectory_csv((dir / "trajectory.csv").string(), result.trajectory);
  manifest.outputs.push_back("trajectory.csv");
  write_cooling_jsonl((dir / "cooling.jsonl").string(), result.trajectory);
  manifest.outputs.push_back("cooling.jsonl");
  if (config.record_entropy_profile) {
    write_entropy_profile_csv((dir / "entropy_profile.csv").string(), result.trajectory, config.n);
    manifest.outputs.push_back("entropy_profile.csv");
  }

  if (config.oracle_compare) {
    if (config.n > kOracleMaxQubits)
      throw std::invalid_argument("config key 'oracle_compare': n exceeds the dense limit of " +
                                  std::to_string(kOracleMaxQubits));
    const PauliSum h = build_model_hamiltonian(config.n, config.model);
    const DenseState psi0 = dense_product_state(config.initial_bits);
    const std::vector<DenseState> exact = exact_evolve(h, psi0, config.dt, config.steps());
    const std::vector<ObservableSpec> observables = config.resolved_observables();
    std::vector<double> times;
    for (const StepRecord& r : result.trajectory.steps) times.push_back(r.t);
    std::vector<std::vector<double>> exact_values(observables.size());
    for (std::size_t o = 0; o < observables.size(); ++o) {
      const ObservableSpec& spec = observables[o];
      for (const DenseState& psi : exact) {
        double v = 0.0;
        if (spec.mode == ObservableSpec::Mode::single) {
          v = exact_expect(psi, spec.pauli);
        } else {
          for (int jj = 0; jj < config.n; ++jj)
            v += exact_expect(psi, PauliString::single_site(config.n, jj, spec.site_op));
          v /= config.n;
        }
        exact_values[o].push_back(v);
      }
    }
    write_exact_csv((dir / "exact.csv").string(), result.trajectory.observable_names, times,
                    exact_values);
    manifest.outputs.push_back("exact.csv");

    ComparisonResult cmp;
    cmp.times = times;
    for (std::size_t o = 0; o < observables.size(); ++o) {
      std::vector<double> approx;
      for (const StepRecord& r : result.trajectory.steps) approx.push_back(r.observables[o]);
      const ErrorSeries err = integrated_error(times, approx, exact_values[o]);
      cmp.names.push_back("eps_" + observables[o].name);
      cmp.epsilon.push_back(err.epsilon);
      cmp.epsilon_T.push_back(err.epsilon_T);
    }
    write_error_csv((dir / "error.csv").string(), cmp);
    manifest.outputs.push_back("error.csv");
  }

  if (dump_final_state) {
    std::ofstream sout(dir / "state.json");
    if (!sout) throw IoError("cannot write state.json");
    sout << state_dump_json(result.state).dump(2) << "\n";
    manifest.outputs.push_back("state.json");
  }

  manifest.finished_at = iso_timestamp();
  json mj;
  mj["schema"] = kCsvSchema;
  mj["code_version"] = manifest.code_version;
  mj["config"] = manifest.config;
  mj["seed"] = manifest.seed;
  mj["rng_algorithm"] = manifest.rng_algorithm;
  mj["started_at"] = manifest.started_at;
  mj["finished_at"] = manifest.finished_at;
  mj["outputs"] = manifest.outputs;
  mj["warnings"] = manifest.warnings;
  std::ofstream mout(dir / "manifest.json");
  if (!mout) throw IoError("cannot write manifest.json");
  mout << mj.dump(2) << "\n";
  manifest.outputs.push_back("manifest.json");
  return manifest;
}

SweepOutcome run_sweep(const EvolutionConfig& base, const std::string& param,
                       const std::vector<double>& values, const std::string& out_dir,
                       int threads) {
  if (values.empty()) throw std::invalid_argument("sweep: no values given");
  static const std::set<std::string> kParams = {"chi_max", "cool_every", "d_layers", "rng_seed"};
  if (!kParams.contains(param))
    throw std::invalid_argument("sweep: unsupported parameter '" + param + "'");
  fs::create_directories(out_dir);

  struct Member {
    EvolutionConfig config;
    std::string dir;
    std::string tag;
  };
  std::vector<Member> members;
  for (double v : values) {
    EvolutionConfig c = base;
    const int iv = static_cast<int>(v);
    if (param == "chi_max") c.chi_max = iv;
    else if (param == "cool_every") c.cool_every = iv;
    else if (param == "d_layers") c.d_layers = iv;
    else c.rng_seed = static_cast<std::uint64_t>(v);
    const std::string tag = param + "=" + std::to_string(iv);
    if (param != "rng_seed")
      c.rng_seed = derive_seed(base.rng_seed, config_to_json(c).dump() + "/" + tag);
    c.validate();
    members.push_back({std::move(c), (fs::path(out_dir) / tag).string(), tag});
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(members.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(members.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < members.size(); i = next.fetch_add(1)) {
        try {
          run_experiment(members[i].config, members[i].dir);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  for (std::size_t i = 0; i < members.size(); ++i)
    if (!errors[i].empty())
      throw std::runtime_error("sweep member " + members[i].tag + " failed: " + errors[i]);

  SweepOutcome outcome;
  const std::string summary_path = (fs::path(out_dir) / "summary.csv").string();
  std::ofstream out(summary_path);
  if (!out) throw IoError("cannot write " + summary_path);
  out << "# sweep-summary-csv v" << kCsvSchema << "\n";
  const bool with_errors = base.oracle_compare;
  out << param;
  if (with_errors) {
    const Series first = read_csv((fs::path(members[0].dir) / "error.csv").string());
    for (const std::string& c : first.columns)
      if (c != "t") out << "," << c << "_T";
  }
  out << "\n";
  for (const Member& m : members) {
    out << (param == "chi_max"     ? m.config.chi_max
            : param == "cool_every" ? m.config.cool_every
            : param == "d_layers"   ? m.config.d_layers
                                    : static_cast<int>(m.config.rng_seed));
    if (with_errors) {
      const Series err = read_csv((fs::path(m.dir) / "error.csv").string());
      for (const auto& [key, vals] : err.footers)
        if (key == "epsilon_T")
          for (double v : vals) out << "," << fmt17(v);
    }
    out << "\n";
    outcome.member_dirs.push_back(m.dir);
  }
  outcome.summary_path = summary_path;
  return outcome;
}

}  // namespace ctdvp::io
