#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctdvp/dressed.hpp"

namespace ctdvp::io {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr int kCsvSchema = 1;

// File-system failures (vs. config errors, which are std::invalid_argument).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Round-trip-exact float formatting (17 significant digits) so determinism
// is testable on the emitted files.
std::string fmt17(double v);

// --- configuration ---

// Strict parse: unknown keys, wrong types, and constraint violations are
// std::invalid_argument naming the offending key.
EvolutionConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const EvolutionConfig& config);
EvolutionConfig load_config(const std::string& path);

// --- tabular data ---

struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Footer key/value pairs (e.g. epsilon_T per column in error files).
  std::vector<std::pair<std::string, std::vector<double>>> footers;

  int column(const std::string& name) const;  // -1 when absent
  std::vector<double> column_values(int idx) const;
};

Series read_csv(const std::string& path);

// --- experiment execution ---

struct RunManifest {
  nlohmann::json config;
  std::string code_version;
  std::uint64_t seed = 0;
  std::string rng_algorithm;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;  // paths relative to the run directory
  std::vector<std::string> warnings;
};

// Runs the configured evolution and emits trajectory.csv, cooling.jsonl and
// manifest.json into out_dir; with oracle_compare set (and n within the dense
// limit) also exact.csv and error.csv. When dump_final_state is set, a
// state.json with per-site tensor shapes and per-bond Schmidt spectra is
// written as well. Returns the manifest.
RunManifest run_experiment(const EvolutionConfig& config, const std::string& out_dir,
                           bool dump_final_state = false);

// Self-describing snapshot of an MPS: tensor shapes plus Schmidt spectra.
nlohmann::json state_dump_json(const MPSState& state);

// eps(t) per shared observable column of two trajectory-style series on
// matching grids. Throws std::invalid_argument on grid mismatch.
struct ComparisonResult {
  std::vector<double> times;
  std::vector<std::string> names;               // eps column names
  std::vector<std::vector<double>> epsilon;     // [name][time]
  std::vector<double> epsilon_T;
};
ComparisonResult compare_series(const Series& a, const Series& b);
void write_error_csv(const std::string& path, const ComparisonResult& result);

// Sweep over a config key (chi_max, cool_every, d_layers, rng_seed); one
// subdirectory per value plus summary.csv. Members run in parallel worker
// threads with seeds derived from (seed, member tag).
struct SweepOutcome {
  std::vector<std::string> member_dirs;
  std::string summary_path;
};
SweepOutcome run_sweep(const EvolutionConfig& base, const std::string& param,
                       const std::vector<double>& values, const std::string& out_dir,
                       int threads);

}  // namespace ctdvp::io
