#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "ctdvp/pauli.hpp"

namespace ctdvp {

struct TruncationReport {
  int bond = 0;
  double discarded_weight = 0.0;  // sum of squared discarded Schmidt values
  int new_dim = 0;
};

enum class SweepDirection { left_to_right, right_to_left };

// Two-site workspace: theta[l, s1, s2, r] stored as four (chi_l x chi_r)
// blocks indexed by s1*2 + s2. Snapshots are immutable and safe to scan in
// parallel.
struct ThetaTensor {
  int chi_l = 0, chi_r = 0;
  std::array<Eigen::MatrixXcd, 4> blocks;

  double norm() const;
  // Matrix grouping ((s1,l) x (s2,r)), s-major composite indices.
  Eigen::MatrixXcd assemble() const;
};

ThetaTensor apply_gate_to_theta(const ThetaTensor& theta, const Eigen::Matrix4cd& u);

// Von Neumann entropy -sum p ln p, p = lambda^2, natural log; values with
// lambda^2 < 1e-16 contribute zero. Throws if the spectrum is not normalized.
double entropy_from_schmidt(const Eigen::VectorXd& lambdas);

// Entropy of the Schmidt spectrum of u*theta; pure function, no state touched.
double entropy_after_gate(const ThetaTensor& theta, const Eigen::Matrix4cd& u);

// Matrix product state with an orthogonality center. Site tensors are stored
// as one (chi_l x chi_r) matrix per physical basis state. Composite indices
// group as (s, l) and (s, r), s-major.
class MPSState {
 public:
  // Bond-dimension-1 product state |bits>, center at site 0.
  static MPSState product_state(const std::vector<int>& bits, int chi_max, double svd_cutoff);

  int n_sites() const { return n_; }
  int center() const { return center_; }
  int chi_max() const { return chi_max_; }
  double svd_cutoff() const { return cutoff_; }

  int bond_dim(int bond) const;  // bonds 0..n-2
  int max_bond_dim() const;

  const Eigen::MatrixXcd& tensor(int site, int s) const {
    return a_[static_cast<std::size_t>(site)][static_cast<std::size_t>(s)];
  }

  // QR-based canonicalization sweep; preserves the global state exactly.
  void move_center(int target);

  // Zero-pads every bond up to min(target_chi, physical rank) and re-gauges
  // with a full QR round trip. The state is unchanged; the padded directions
  // give the single-site integrator room to rotate amplitude into (the
  // single-site scheme itself never grows bonds).
  void pad_bond_dimensions(int target_chi);

  // Contracts sites (bond, bond+1), applies u, SVD-splits with truncation to
  // chi_max / svd_cutoff, renormalizes the kept spectrum, and leaves the
  // center at bond+1 (left_to_right) or bond (right_to_left). Requires the
  // center adjacent to the bond and u unitary to 1e-10.
  TruncationReport apply_two_site_gate(const Eigen::Matrix4cd& u, int bond, SweepDirection dir);

  // Schmidt spectrum / entropy across a bond; center must be adjacent.
  Eigen::VectorXd schmidt_values(int bond) const;
  double bond_entropy(int bond) const;

  // Spectra of all bonds, computed by walking a temporary center matrix
  // outward from the orthogonality center; the state is not modified.
  std::vector<Eigen::VectorXd> schmidt_profile() const;

  double expect_pauli(const PauliString& p) const;

  ThetaTensor two_site_theta(int bond) const;

  double norm() const;

  Eigen::VectorXcd to_dense() const;  // n <= 16 guard

  // --- sweep-level primitives (used by the TDVP integrator) ---

  // Center tensor flattened s-major, blocks column-major.
  Eigen::VectorXcd center_vector() const;
  void set_center_from_vector(const Eigen::VectorXcd& v);

  // Splits the center tensor into an isometry (kept in place) and the bond
  // matrix (returned); the state enters bond gauge until absorb_bond.
  Eigen::MatrixXcd split_center(SweepDirection dir);
  // Contracts the bond matrix into the neighbor, which becomes the center.
  void absorb_bond(const Eigen::MatrixXcd& c, SweepDirection dir);

  bool is_left_isometric(int site, double tol = 1e-10) const;
  bool is_right_isometric(int site, double tol = 1e-10) const;

 private:
  MPSState() = default;
  void left_normalize_step(int site);
  void right_normalize_step(int site);
  Eigen::MatrixXcd row_stacked(int site) const;  // (2*chi_l) x chi_r
  Eigen::MatrixXcd col_stacked(int site) const;  // chi_l x (2*chi_r)

  int n_ = 0;
  int center_ = 0;      // -1 while in bond gauge
  int split_site_ = -1; // site whose split produced the pending bond matrix
  int chi_max_ = 0;
  double cutoff_ = 0.0;
  std::vector<std::array<Eigen::MatrixXcd, 2>> a_;
};

}  // namespace ctdvp
