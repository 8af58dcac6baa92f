#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ctdvp/linear_map.hpp"
#include "ctdvp/pauli.hpp"
#include "ctdvp/tableau.hpp"

namespace ctdvp {

// Dense exact-evolution reference for small chains; ground truth for the
// tensor-network path.
struct DenseState {
  int n_qubits = 0;
  Eigen::VectorXcd amplitudes;
};

inline constexpr int kOracleMaxQubits = 14;

DenseState dense_product_state(const std::vector<int>& bits);

// Matrix-free P|psi> via basis-index bit twiddling (site 0 = most significant
// bit, matching dense_pauli).
void apply_pauli_dense(const PauliString& p, const Eigen::VectorXcd& in, Eigen::VectorXcd& out);

// Matrix-free H|psi> for a Pauli-sum Hamiltonian; memory stays at a few
// state vectors regardless of the term count.
class PauliSumApplier : public LinearMap {
 public:
  explicit PauliSumApplier(const PauliSum& h) : ham_(&h) {}
  Eigen::Index dim() const override;
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const override;

 private:
  const PauliSum* ham_;
};

// Dense matrix of the Hamiltonian; guarded to n <= 12 (use PauliSumApplier
// above that).
Eigen::MatrixXcd densify(const PauliSum& h);

// States at t = 0, dt, ..., steps*dt under exp(-i H dt), propagated with a
// tight-tolerance Lanczos exponential (initial state included).
std::vector<DenseState> exact_evolve(const PauliSum& h, const DenseState& psi0, double dt,
                                     int steps);

double exact_expect(const DenseState& psi, const PauliString& p);

// Dense unitary realizing an n-qubit tableau (n <= 10), unique up to global
// phase: the first column is reconstructed from the stabilizer projectors of
// the Z images, the rest by applying the X-string images.
Eigen::MatrixXcd dense_clifford_unitary(const CliffordTableau& t);

}  // namespace ctdvp
