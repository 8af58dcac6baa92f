#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "ctdvp/linear_map.hpp"
#include "ctdvp/mps.hpp"
#include "ctdvp/pauli.hpp"

namespace ctdvp {

class Environments;

// H^eff at a site or K^eff at a bond: sum_k J_k (L_k . sigma^mu_k . R_k)
// applied matrix-free to the flattened center tensor / bond matrix. Views
// into the owning Environments; valid while its blocks are frozen.
class EffectiveOperator : public LinearMap {
 public:
  enum class Kind { site, bond };

  Eigen::Index dim() const override;
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const override;

  Kind kind() const { return kind_; }

 private:
  friend class Environments;
  struct TermView {
    double coupling = 0.0;
    const Eigen::MatrixXcd* left = nullptr;   // nullptr means identity block
    const Eigen::MatrixXcd* right = nullptr;  // nullptr means identity block
    int pauli = 0;                            // local operator at the site (Kind::site)
  };
  Kind kind_ = Kind::site;
  Eigen::Index chi_l = 0, chi_r = 0;
  std::vector<TermView> terms_;
};

// Left/right transfer blocks per Hamiltonian term. Because every term is a
// single Pauli string, the operator auxiliary dimension is diagonal: each
// term carries one chi x chi block per side and they never mix.
class Environments {
 public:
  // Builds all blocks consistent with the state's current center position.
  Environments(const MPSState& state, PauliSum hamiltonian);

  const PauliSum& hamiltonian() const { return ham_; }

  // Replaces the Hamiltonian (e.g. after conjugation) and rebuilds everything.
  void reset(const MPSState& state, PauliSum hamiltonian);
  void rebuild(const MPSState& state);

  // One transfer contraction per term; the tensor at `site` must already be
  // isometric in the sweep direction.
  void advance_left(const MPSState& state, int site);    // left block at site from site-1
  void advance_right(const MPSState& state, int site);   // right block at site from site+1

  // Tensors at `site` changed; blocks covering it become stale.
  void mark_site_dirty(int site);

  // Requires left blocks through site-1 and right blocks from site+1.
  EffectiveOperator effective_site(int site) const;
  // Requires the left block with `bond` (= site index) absorbed and the right
  // block from bond+1.
  EffectiveOperator effective_bond(int bond) const;

  // Block accessors for tests; nullptr when the block is an identity flag.
  const Eigen::MatrixXcd* left_block(int term, int site) const;
  const Eigen::MatrixXcd* right_block(int term, int site) const;

  int left_valid_through() const { return left_valid_; }
  int right_valid_from() const { return right_valid_; }

 private:
  void check_fresh(bool ok, const char* what) const;
  void compute_left(const MPSState& state, int site);
  void compute_right(const MPSState& state, int site);

  PauliSum ham_;
  int n_ = 0;
  // left_[k][s]: block covering sites 0..s; right_[k][s]: covering s..n-1.
  std::vector<std::vector<Eigen::MatrixXcd>> left_, right_;
  std::vector<std::vector<char>> left_identity_, right_identity_;
  // Bond dims recorded when blocks were computed (identity blocks carry no
  // matrix, so the dimension must be stored separately).
  std::vector<Eigen::Index> left_dim_, right_dim_;
  int left_valid_ = -1;  // left blocks valid for sites <= this
  int right_valid_ = 0;  // right blocks valid for sites >= this
};

}  // namespace ctdvp
