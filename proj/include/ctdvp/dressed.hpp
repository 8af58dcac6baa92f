#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ctdvp/disentangler.hpp"
#include "ctdvp/mps.hpp"
#include "ctdvp/pauli.hpp"
#include "ctdvp/tableau.hpp"
#include "ctdvp/tdvp.hpp"

namespace ctdvp {

struct ObservableSpec {
  enum class Mode { single, site_average };
  std::string name;
  Mode mode = Mode::single;
  PauliString pauli;    // full-length string (single mode)
  char site_op = 'Z';   // replicated per site (site_average mode)
};

struct EvolutionConfig {
  int n = 0;
  int chi_max = 128;
  double svd_cutoff = 0.0;
  double dt = 0.05;
  double t_final = 8.0;
  int cool_every = 10;  // k; 0 disables cooling (plain TDVP)
  int d_layers = 1;     // D
  ModelParams model;
  std::vector<int> initial_bits;
  std::vector<ObservableSpec> observables;
  std::uint64_t rng_seed = 0;
  bool oracle_compare = false;
  double tie_tolerance = 1e-12;
  double entropy_floor = 1e-14;
  bool record_entropy_profile = false;
  KrylovParams krylov;

  int steps() const;              // floor(t_final / dt), tolerant of roundoff
  void validate() const;          // throws std::invalid_argument naming the key
  std::vector<ObservableSpec> resolved_observables() const;  // defaults applied
};

struct StepRecord {
  int step = 0;
  double t = 0.0;
  std::vector<double> observables;
  double entropy_mid = 0.0;
  std::vector<double> entropy_profile;  // filled when requested
  int max_chi = 1;
  double discarded_cum = 0.0;
  double energy = 0.0;
  bool cooled = false;
  double wall_ms = 0.0;
};

struct TrajectoryRecord {
  std::vector<std::string> observable_names;
  std::vector<StepRecord> steps;
  std::vector<GateRecord> cooling_gates;
  // (step, invocation tableau hex, accumulated tableau hex) per cooling event
  struct TableauLogEntry {
    int step;
    std::string invocation_hex;
    std::string accumulated_hex;
  };
  std::vector<TableauLogEntry> tableau_log;
  int warnings = 0;
};

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> epsilon;
  double epsilon_T = 0.0;
};

// Each term conjugated through the tableau; term count and Hermiticity are
// preserved (signs fold into couplings).
PauliSum conjugate_hamiltonian(const PauliSum& h, const CliffordTableau& c);

// Image of a bare observable under the accumulated Clifford; measuring it on
// the dressed state equals measuring the original on the undressed state.
PauliString transform_observable(const PauliString& p, const CliffordTableau& accumulated);

struct EvolutionResult {
  TrajectoryRecord trajectory;
  MPSState state;
  CliffordTableau accumulated;
};

// Called after each recorded step (including step 0) with the current state
// and accumulated Clifford; used by diagnostics and the acceptance suite.
using StepObserver = std::function<void(int step, const MPSState&, const CliffordTableau&)>;

EvolutionResult run_dressed_evolution(const EvolutionConfig& config);
EvolutionResult run_dressed_evolution(const EvolutionConfig& config, const StepObserver& observer);

// Time-averaged integrated absolute deviation:
//   eps(t_m) = trapezoid(|approx - exact|, [0, t_m]) / t_m,  eps(0) = |diff(0)|.
ErrorSeries integrated_error(const std::vector<double>& times, const std::vector<double>& approx,
                             const std::vector<double>& exact);

}  // namespace ctdvp
