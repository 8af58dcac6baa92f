#include "ctdvp/envs.hpp"

#include <cassert>
#include <complex>
#include <stdexcept>

namespace ctdvp {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Complex = std::complex<double>;

// sigma^mu as a generalized permutation: |s> -> factor(s) |target(s)>.
inline int pauli_target(int pauli, int s) { return (pauli == 1 || pauli == 2) ? 1 - s : s; }

inline Complex pauli_factor(int pauli, int s) {
  switch (pauli) {
    case 0: return 1.0;
    case 1: return 1.0;
    case 2: return s == 0 ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
    default: return s == 0 ? 1.0 : -1.0;
  }
}

}  // namespace

Eigen::Index EffectiveOperator::dim() const {
  return (kind_ == Kind::site ? 2 : 1) * chi_l * chi_r;
}

void EffectiveOperator::apply(const VectorXcd& in, VectorXcd& out) const {
  if (in.size() != dim()) throw std::invalid_argument("EffectiveOperator: dimension mismatch");
  out.setZero(in.size());
  const Eigen::Index block = chi_l * chi_r;
  if (kind_ == Kind::site) {
    const Eigen::Map<const MatrixXcd> vin[2] = {
        {in.data(), chi_l, chi_r}, {in.data() + block, chi_l, chi_r}};
    Eigen::Map<MatrixXcd> vout[2] = {
        {out.data(), chi_l, chi_r}, {out.data() + block, chi_l, chi_r}};
    MatrixXcd t1, t2;
    for (const TermView& term : terms_) {
      for (int s = 0; s < 2; ++s) {
        const int sp = pauli_target(term.pauli, s);
        const Complex f = term.coupling * pauli_factor(term.pauli, s);
        if (term.left != nullptr) {
          t1.noalias() = (*term.left) * vin[s];
          if (term.right != nullptr) {
            t2.noalias() = t1 * term.right->transpose();
            vout[sp].noalias() += f * t2;
          } else {
            vout[sp].noalias() += f * t1;
          }
        } else if (term.right != nullptr) {
          t1.noalias() = vin[s] * term.right->transpose();
          vout[sp].noalias() += f * t1;
        } else {
          vout[sp].noalias() += f * vin[s];
        }
      }
    }
  } else {
    const Eigen::Map<const MatrixXcd> vin(in.data(), chi_l, chi_r);
    Eigen::Map<MatrixXcd> vout(out.data(), chi_l, chi_r);
    MatrixXcd t1, t2;
    for (const TermView& term : terms_) {
      if (term.left != nullptr) {
        t1.noalias() = (*term.left) * vin;
        if (term.right != nullptr) {
          t2.noalias() = t1 * term.right->transpose();
          vout.noalias() += term.coupling * t2;
        } else {
          vout.noalias() += term.coupling * t1;
        }
      } else if (term.right != nullptr) {
        t1.noalias() = vin * term.right->transpose();
        vout.noalias() += term.coupling * t1;
      } else {
        vout.noalias() += term.coupling * vin;
      }
    }
  }
}

Environments::Environments(const MPSState& state, PauliSum hamiltonian)
    : ham_(std::move(hamiltonian)), n_(state.n_sites()) {
  if (ham_.n_qubits() != n_)
    throw std::invalid_argument("Environments: state and Hamiltonian sizes differ");
  rebuild(state);
}

void Environments::reset(const MPSState& state, PauliSum hamiltonian) {
  if (hamiltonian.n_qubits() != n_)
    throw std::invalid_argument("Environments: state and Hamiltonian sizes differ");
  ham_ = std::move(hamiltonian);
  rebuild(state);
}

void Environments::rebuild(const MPSState& state) {
  const std::size_t k = ham_.size();
  const std::size_t n = static_cast<std::size_t>(n_);
  left_.assign(k, std::vector<MatrixXcd>(n));
  right_.assign(k, std::vector<MatrixXcd>(n));
  left_identity_.assign(k, std::vector<char>(n, 0));
  right_identity_.assign(k, std::vector<char>(n, 0));
  left_dim_.assign(n, 1);
  right_dim_.assign(n, 1);
  const int c = state.center();
  if (c < 0) throw std::logic_error("Environments: state is in bond gauge");
  left_valid_ = -1;
  right_valid_ = n_;
  for (int s = 0; s < c; ++s) advance_left(state, s);
  for (int s = n_ - 1; s > c; --s) advance_right(state, s);
}

void Environments::mark_site_dirty(int site) {
  left_valid_ = std::min(left_valid_, site - 1);
  right_valid_ = std::max(right_valid_, site + 1);
}

void Environments::advance_left(const MPSState& state, int site) {
  if (site != left_valid_ + 1)
    throw std::logic_error("advance_left: previous block is not current");
  assert(state.is_left_isometric(site));
  compute_left(state, site);
  left_valid_ = site;
}

void Environments::advance_right(const MPSState& state, int site) {
  if (site != right_valid_ - 1)
    throw std::logic_error("advance_right: next block is not current");
  assert(state.is_right_isometric(site));
  compute_right(state, site);
  right_valid_ = site;
}

void Environments::compute_left(const MPSState& state, int site) {
  const MatrixXcd& a0 = state.tensor(site, 0);
  const MatrixXcd& a1 = state.tensor(site, 1);
  const MatrixXcd* a[2] = {&a0, &a1};
  left_dim_[static_cast<std::size_t>(site)] = a0.cols();
  for (std::size_t k = 0; k < ham_.size(); ++k) {
    const int pauli = ham_.terms()[k].string.site_index(site);
    const bool prev_identity = site == 0 || left_identity_[k][static_cast<std::size_t>(site - 1)];
    if (prev_identity && pauli == 0) {
      left_identity_[k][static_cast<std::size_t>(site)] = 1;
      left_[k][static_cast<std::size_t>(site)] = MatrixXcd();
      continue;
    }
    left_identity_[k][static_cast<std::size_t>(site)] = 0;
    MatrixXcd next = MatrixXcd::Zero(a0.cols(), a0.cols());
    const MatrixXcd* prev = prev_identity ? nullptr : &left_[k][static_cast<std::size_t>(site - 1)];
    for (int s = 0; s < 2; ++s) {
      const int sp = pauli_target(pauli, s);
      const Complex f = pauli_factor(pauli, s);
      if (prev != nullptr)
        next.noalias() += f * (a[sp]->adjoint() * (*prev) * (*a[s]));
      else
        next.noalias() += f * (a[sp]->adjoint() * (*a[s]));
    }
    left_[k][static_cast<std::size_t>(site)] = std::move(next);
  }
}

void Environments::compute_right(const MPSState& state, int site) {
  const MatrixXcd& a0 = state.tensor(site, 0);
  const MatrixXcd& a1 = state.tensor(site, 1);
  const MatrixXcd* a[2] = {&a0, &a1};
  right_dim_[static_cast<std::size_t>(site)] = a0.rows();
  for (std::size_t k = 0; k < ham_.size(); ++k) {
    const int pauli = ham_.terms()[k].string.site_index(site);
    const bool next_identity =
        site == n_ - 1 || right_identity_[k][static_cast<std::size_t>(site + 1)];
    if (next_identity && pauli == 0) {
      right_identity_[k][static_cast<std::size_t>(site)] = 1;
      right_[k][static_cast<std::size_t>(site)] = MatrixXcd();
      continue;
    }
    right_identity_[k][static_cast<std::size_t>(site)] = 0;
    MatrixXcd next = MatrixXcd::Zero(a0.rows(), a0.rows());
    const MatrixXcd* succ = next_identity ? nullptr : &right_[k][static_cast<std::size_t>(site + 1)];
    for (int s = 0; s < 2; ++s) {
      const int sp = pauli_target(pauli, s);
      const Complex f = pauli_factor(pauli, s);
      if (succ != nullptr)
        next.noalias() += f * (a[sp]->conjugate() * (*succ) * a[s]->transpose());
      else
        next.noalias() += f * (a[sp]->conjugate() * a[s]->transpose());
    }
    right_[k][static_cast<std::size_t>(site)] = std::move(next);
  }
}

void Environments::check_fresh(bool ok, const char* what) const {
  if (!ok) throw std::logic_error(std::string(what) + ": stale environment blocks");
}

const MatrixXcd* Environments::left_block(int term, int site) const {
  if (site < 0) return nullptr;
  const auto k = static_cast<std::size_t>(term);
  return left_identity_[k][static_cast<std::size_t>(site)] ? nullptr
                                                           : &left_[k][static_cast<std::size_t>(site)];
}

const MatrixXcd* Environments::right_block(int term, int site) const {
  if (site >= n_) return nullptr;
  const auto k = static_cast<std::size_t>(term);
  return right_identity_[k][static_cast<std::size_t>(site)]
             ? nullptr
             : &right_[k][static_cast<std::size_t>(site)];
}

EffectiveOperator Environments::effective_site(int site) const {
  check_fresh(left_valid_ >= site - 1 && right_valid_ <= site + 1, "effective_site");
  EffectiveOperator op;
  op.kind_ = EffectiveOperator::Kind::site;
  op.chi_l = site == 0 ? 1 : left_dim_[static_cast<std::size_t>(site - 1)];
  op.chi_r = site == n_ - 1 ? 1 : right_dim_[static_cast<std::size_t>(site + 1)];
  op.terms_.reserve(ham_.size());
  for (std::size_t k = 0; k < ham_.size(); ++k) {
    EffectiveOperator::TermView view;
    view.coupling = ham_.terms()[k].coefficient;
    view.left = left_block(static_cast<int>(k), site - 1);
    view.right = right_block(static_cast<int>(k), site + 1);
    view.pauli = ham_.terms()[k].string.site_index(site);
    op.terms_.push_back(view);
  }
  return op;
}

EffectiveOperator Environments::effective_bond(int bond) const {
  check_fresh(left_valid_ >= bond && right_valid_ <= bond + 1, "effective_bond");
  EffectiveOperator op;
  op.kind_ = EffectiveOperator::Kind::bond;
  op.chi_l = left_dim_[static_cast<std::size_t>(bond)];
  op.chi_r = right_dim_[static_cast<std::size_t>(bond + 1)];
  op.terms_.reserve(ham_.size());
  for (std::size_t k = 0; k < ham_.size(); ++k) {
    EffectiveOperator::TermView view;
    view.coupling = ham_.terms()[k].coefficient;
    view.left = left_block(static_cast<int>(k), bond);
    view.right = right_block(static_cast<int>(k), bond + 1);
    view.pauli = 0;
    op.terms_.push_back(view);
  }
  return op;
}

}  // namespace ctdvp
