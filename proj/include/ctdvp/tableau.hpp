#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ctdvp/pauli.hpp"
#include "ctdvp/rng.hpp"

namespace ctdvp {

class Rng;

// Stabilizer tableau of an n-qubit Clifford unitary C: the signed Pauli
// images C X_j C^dag and C Z_j C^dag. The 2n x 2n symplectic matrix of the
// spec is stored row-wise as PauliStrings (row j = image of X_j, row n+j =
// image of Z_j), each carrying its sign bit.
class CliffordTableau {
 public:
  CliffordTableau() = default;
  explicit CliffordTableau(int n_qubits);  // identity

  static CliffordTableau from_images(std::vector<PauliString> x_images,
                                     std::vector<PauliString> z_images);

  // Tableau of the unitary "left-multiply by Pauli p": identity symplectic
  // part, sign bit r set iff p anticommutes with generator r.
  static CliffordTableau pauli_conjugation(const PauliString& p);

  int n_qubits() const { return n_; }
  const PauliString& x_image(int j) const { return rows_[static_cast<std::size_t>(j)]; }
  const PauliString& z_image(int j) const { return rows_[static_cast<std::size_t>(n_ + j)]; }
  const PauliString& row(int r) const { return rows_[static_cast<std::size_t>(r)]; }

  // Generator r of the chain: X_r for r < n, Z_{r-n} otherwise.
  static PauliString generator(int r, int n_qubits);

  bool is_symplectic() const;  // M Lambda M^T = Lambda, i.e. commutation-preserving
  bool is_identity() const;

  // Symplectic part only (signs ignored); used for canonical hashing.
  std::string symplectic_key() const;
  // Row-major x|z bits then sign bits, packed and hex-encoded.
  std::string hex_encode() const;

  bool operator==(const CliffordTableau& o) const = default;

 private:
  int n_ = 0;
  std::vector<PauliString> rows_;  // size 2n
};

// C p C^dag as a signed Pauli string. Throws on size mismatch.
PauliString conjugate_pauli(const CliffordTableau& t, const PauliString& p);

// Tableau of outer*inner (outer applied after inner).
CliffordTableau compose(const CliffordTableau& outer, const CliffordTableau& inner);

// Tableau of the inverse unitary; compose(t, invert(t)) is the identity.
CliffordTableau invert(const CliffordTableau& t);

// Lifts a two-qubit tableau to n qubits, acting on (bond, bond+1).
CliffordTableau embed(const CliffordTableau& t2, int bond, int n_qubits);

// All 720 two-qubit tableaux with positive sign, i.e. the full symplectic
// group Sp(4, F2) with zero sign bits, in a fixed deterministic order.
std::vector<CliffordTableau> enumerate_two_qubit_positive();

// 4x4 unitary realizing a two-qubit tableau, built from a H/S/CNOT word and
// normalized so the first nonzero entry (row-major) is real positive. The
// conjugation action matches conjugate_pauli up to that global phase.
Eigen::Matrix4cd synthesize_unitary(const CliffordTableau& t);

// A candidate disentangler: tableau plus its synthesized unitary.
struct TwoQubitGate {
  CliffordTableau tableau;
  Eigen::Matrix4cd unitary;
  int candidate_id = -1;
};

// The 720 candidates with unitaries attached, computed once and shared.
const std::vector<TwoQubitGate>& two_qubit_gate_set();

// Index of the identity tableau within the candidate set.
int identity_candidate_id();

// Uniform draw from the 16 two-qubit Paulis (sign +1). Left-multiplying the
// committed gate by the draw realizes one of the 2^4 generator-sign flips.
PauliString random_sign_pauli(Rng& rng);

// Index 0..15 of a two-qubit Pauli: 4*mu(site0) + mu(site1).
int two_qubit_pauli_index(const PauliString& p);
PauliString two_qubit_pauli_from_index(int index);

// Dense matrix of an n-qubit Pauli (site 0 = most significant bit).
Eigen::MatrixXcd dense_pauli(const PauliString& p);

}  // namespace ctdvp
