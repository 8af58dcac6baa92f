#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ctdvp {

// Signed N-qubit Pauli operator in binary symplectic form.
//
// The stored triple (x, z, sign) represents the Hermitian operator
//   sign * prod_j sigma_j^{mu_j},  mu_j = I/X/Y/Z for (x_j,z_j) = 00/10/11/01,
// i.e. the i^(x.z) phase of X^x Z^z is folded into the Y convention so that
// sign in {+1,-1} always suffices.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n_qubits);  // identity, sign +1

  // Parses "XIZY..." with an optional leading '+'/'-'. Throws
  // std::invalid_argument naming the offending position on bad input.
  static PauliString from_labels(std::string_view labels, int sign = +1);

  // Single sigma^op on `site` (op in {I,X,Y,Z}), identity elsewhere.
  static PauliString single_site(int n_qubits, int site, char op, int sign = +1);

  int n_qubits() const { return n_; }
  bool x(int j) const { return x_[static_cast<std::size_t>(j)] != 0; }
  bool z(int j) const { return z_[static_cast<std::size_t>(j)] != 0; }
  void set_x(int j, bool v) { x_[static_cast<std::size_t>(j)] = v ? 1 : 0; }
  void set_z(int j, bool v) { z_[static_cast<std::size_t>(j)] = v ? 1 : 0; }
  int sign() const { return sign_; }
  void set_sign(int s);
  void flip_sign() { sign_ = -sign_; }

  // Pauli index at site j: 0=I, 1=X, 2=Y, 3=Z.
  int site_index(int j) const;
  char site_label(int j) const;

  // Number of non-identity sites.
  int weight() const;
  bool is_identity() const;

  // Number of sites with x_j = z_j = 1.
  int y_count() const;

  std::string labels() const;  // "+XIZ..." / "-XIZ..."

  bool same_axes(const PauliString& o) const { return x_ == o.x_ && z_ == o.z_; }
  bool operator==(const PauliString& o) const = default;

  // Lexicographic on (z_bits, x_bits), sign ignored; canonical term order.
  static bool axes_less(const PauliString& a, const PauliString& b);

 private:
  int n_ = 0;
  std::vector<std::uint8_t> x_, z_;
  int sign_ = +1;
};

// Product tracked with an explicit i-exponent: value = i^i_exponent * string,
// where `string` is the Hermitian canonical Pauli with sign +1.
struct PhasedPauli {
  PauliString string;
  int i_exponent = 0;  // mod 4
};

// Full Pauli-group product with phase tracking. Never throws on size-matched
// inputs; the caller interprets the i-exponent.
PhasedPauli multiply_phased(const PauliString& p, const PauliString& q);

// Hermitian-only product: throws std::domain_error when p*q is not Hermitian
// (odd i-exponent), e.g. X*Z on the same site.
PauliString multiply(const PauliString& p, const PauliString& q);

// True iff the symplectic inner product sum_j (p.x_j q.z_j + p.z_j q.x_j)
// vanishes mod 2.
bool commutes(const PauliString& p, const PauliString& q);

// Real-weighted sum of Pauli strings representing a Hermitian operator.
// Terms are kept canonical: signs folded into coefficients, axes unique,
// sorted by (z_bits, x_bits), coefficients pruned below 1e-15.
class PauliSum {
 public:
  struct Term {
    double coefficient = 0.0;
    PauliString string;  // sign always +1
  };

  explicit PauliSum(int n_qubits) : n_(n_qubits) {}

  int n_qubits() const { return n_; }
  void add_term(double coefficient, const PauliString& s);
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  // Max |coefficient|*weighted bound: sum_k |J_k| (operator-norm bound).
  double one_norm() const;

 private:
  static constexpr double kPruneThreshold = 1e-15;
  int n_ = 0;
  std::vector<Term> terms_;
};

// Couplings of the bare benchmark Hamiltonian
//   j1x sum_j X_j X_{j+1} + j1y sum_j Y_j Y_{j+1}
//   + j2x sum_j X_j X_{j+2} + h sum_j Z_j
// with open boundaries.
struct ModelParams {
  double j1x = 0.0;
  double j1y = 0.0;
  double j2x = 0.0;
  double h = 0.0;
};

// Throws std::invalid_argument when n_sites is too small for the requested
// couplings (n >= 3 required when j2x != 0, n >= 2 otherwise).
PauliSum build_model_hamiltonian(int n_sites, const ModelParams& params);

}  // namespace ctdvp
