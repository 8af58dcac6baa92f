#include "ctdvp/disentangler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctdvp {

namespace {

// Candidate entropies over an immutable snapshot; parallel map with a
// deterministic reduction (min first, then ascending candidate id).
std::vector<double> scan_candidates(const ThetaTensor& theta,
                                    const std::vector<TwoQubitGate>& candidates) {
  std::vector<double> entropy(candidates.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long long c = 0; c < static_cast<long long>(candidates.size()); ++c)
    entropy[static_cast<std::size_t>(c)] =
        entropy_after_gate(theta, candidates[static_cast<std::size_t>(c)].unitary);
  return entropy;
}

}  // namespace

BondOptimization optimize_bond(MPSState& state, int bond,
                               const std::vector<TwoQubitGate>& candidates, Rng& rng,
                               const CoolingConfig& config, SweepDirection commit_dir) {
  const int n = state.n_sites();
  BondOptimization result;
  GateRecord& rec = result.record;
  rec.bond = bond;
  rec.entropy_before = state.bond_entropy(bond);

  if (rec.entropy_before < config.entropy_floor) {
    // Identity is a legal minimizer; skip the scan entirely.
    rec.candidate_id = identity_candidate_id();
    rec.sign_pauli_id = 0;
    rec.entropy_after = rec.entropy_before;
    rec.skipped = true;
    if (state.center() != (commit_dir == SweepDirection::left_to_right ? bond + 1 : bond))
      state.move_center(commit_dir == SweepDirection::left_to_right ? bond + 1 : bond);
    result.chosen = CliffordTableau(n);
    return result;
  }

  const ThetaTensor theta = state.two_site_theta(bond);
  const std::vector<double> entropy = scan_candidates(theta, candidates);

  double best = entropy[0];
  for (double e : entropy) best = std::min(best, e);
  std::vector<int> ties;
  for (std::size_t c = 0; c < entropy.size(); ++c)
    if (entropy[c] <= best + config.tie_tolerance) ties.push_back(static_cast<int>(c));

  const int chosen_id = ties[rng.uniform_index(ties.size())];
  const PauliString sign_pauli = random_sign_pauli(rng);
  const TwoQubitGate& gate = candidates[static_cast<std::size_t>(chosen_id)];

  const Eigen::Matrix4cd committed = dense_pauli(sign_pauli) * gate.unitary;
  const TruncationReport trunc = state.apply_two_site_gate(committed, bond, commit_dir);

  rec.candidate_id = chosen_id;
  rec.sign_pauli_id = two_qubit_pauli_index(sign_pauli);
  rec.entropy_after = entropy[static_cast<std::size_t>(chosen_id)];
  rec.discarded_weight = trunc.discarded_weight;

  result.chosen = embed(compose(CliffordTableau::pauli_conjugation(sign_pauli), gate.tableau),
                        bond, n);
  return result;
}

CoolingResult cooling_sweep(MPSState& state, const CoolingConfig& config, Rng& rng) {
  if (config.d_layers < 0) throw std::invalid_argument("cooling_sweep: d_layers must be >= 0");
  const int n = state.n_sites();
  const std::vector<TwoQubitGate>& candidates = two_qubit_gate_set();

  CoolingResult result;
  result.accumulated = CliffordTableau(n);

  state.move_center(midpoint_bond(n));
  result.report.midpoint_entropy_before = state.bond_entropy(midpoint_bond(n));

  for (int layer = 0; layer < config.d_layers; ++layer) {
    // One checkerboard: odd-start bonds, then even-start bonds; traversal
    // direction alternates between successive bi-layers.
    const bool reversed = (layer % 2) == 1;
    std::vector<int> bonds;
    for (int start : {1, 0}) {
      std::vector<int> group;
      for (int b = start; b + 1 < n; b += 2) group.push_back(b);
      if (reversed) std::reverse(group.begin(), group.end());
      bonds.insert(bonds.end(), group.begin(), group.end());
    }
    for (std::size_t i = 0; i < bonds.size(); ++i) {
      const int bond = bonds[i];
      state.move_center(bond);
      const SweepDirection dir = (i + 1 < bonds.size() && bonds[i + 1] > bond)
                                     ? SweepDirection::left_to_right
                                     : SweepDirection::right_to_left;
      BondOptimization opt = optimize_bond(state, bond, candidates, rng, config, dir);
      opt.record.layer = layer;
      result.report.gates.push_back(opt.record);
      if (!opt.record.skipped)
        result.accumulated = compose(opt.chosen, result.accumulated);
    }
  }

  state.move_center(midpoint_bond(n));
  result.report.midpoint_entropy_after = state.bond_entropy(midpoint_bond(n));
  state.move_center(0);
  result.report.accumulated_tableau_hex = result.accumulated.hex_encode();
  return result;
}

}  // namespace ctdvp
