#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctdvp/mps.hpp"
#include "ctdvp/rng.hpp"
#include "ctdvp/tableau.hpp"

namespace ctdvp {

struct CoolingConfig {
  int d_layers = 1;             // number of checkerboard bi-layers D
  double tie_tolerance = 1e-12; // absolute entropy window defining the tie set
  double entropy_floor = 1e-14; // bonds below this are skipped (identity committed)
};

struct GateRecord {
  int step = -1;   // evolution step stamp (filled by the caller)
  int layer = 0;   // bi-layer index within the invocation
  int bond = 0;
  int candidate_id = 0;
  int sign_pauli_id = 0;
  // Entropies of the exact (untruncated) two-site tensor before/after the
  // chosen gate; truncation on commit is reported separately.
  double entropy_before = 0.0;
  double entropy_after = 0.0;
  double discarded_weight = 0.0;
  bool skipped = false;  // bond below the entropy floor
};

struct CoolingReport {
  std::vector<GateRecord> gates;
  double midpoint_entropy_before = 0.0;
  double midpoint_entropy_after = 0.0;
  std::string accumulated_tableau_hex;
};

struct BondOptimization {
  CliffordTableau chosen;  // embedded n-qubit tableau of (sign Pauli * gate)
  GateRecord record;
};

// Scans all 720 candidates on the exact two-site tensor, samples uniformly
// from the tie set of entropy minimizers, reinjects a random sign Pauli, and
// commits (P * U) to the state with truncation at chi_max. The center must be
// adjacent to the bond; it ends on the side given by commit_dir.
BondOptimization optimize_bond(MPSState& state, int bond, const std::vector<TwoQubitGate>& candidates,
                               Rng& rng, const CoolingConfig& config, SweepDirection commit_dir);

struct CoolingResult {
  CliffordTableau accumulated;  // later gates outermost
  CoolingReport report;
};

// D bi-layers; each optimizes the odd-start bonds then the even-start bonds,
// with the within-layer traversal direction alternating between successive
// bi-layers (left-to-right, then right-to-left). Leaves the center at site 0.
CoolingResult cooling_sweep(MPSState& state, const CoolingConfig& config, Rng& rng);

// Midpoint bond index (split as even as the chain allows).
inline int midpoint_bond(int n_sites) { return (n_sites - 1) / 2; }

}  // namespace ctdvp
