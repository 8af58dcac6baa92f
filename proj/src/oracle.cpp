#include "ctdvp/oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "ctdvp/tdvp.hpp"

namespace ctdvp {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Complex = std::complex<double>;

Complex i_power(int e) {
  switch (e & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

struct PauliMasks {
  std::uint64_t x = 0, z = 0;
  Complex prefactor;  // sign * i^(#Y)
};

PauliMasks masks_of(const PauliString& p) {
  PauliMasks m;
  const int n = p.n_qubits();
  for (int j = 0; j < n; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - j);
    if (p.x(j)) m.x |= bit;
    if (p.z(j)) m.z |= bit;
  }
  m.prefactor = static_cast<double>(p.sign()) * i_power(p.y_count());
  return m;
}

void check_size(int n) {
  if (n > kOracleMaxQubits)
    throw std::invalid_argument("oracle: chain exceeds the dense reference limit");
}

}  // namespace

DenseState dense_product_state(const std::vector<int>& bits) {
  const int n = static_cast<int>(bits.size());
  check_size(n);
  DenseState psi;
  psi.n_qubits = n;
  psi.amplitudes = VectorXcd::Zero(std::int64_t{1} << n);
  std::uint64_t idx = 0;
  for (int j = 0; j < n; ++j)
    if (bits[static_cast<std::size_t>(j)]) idx |= std::uint64_t{1} << (n - 1 - j);
  psi.amplitudes(static_cast<Eigen::Index>(idx)) = 1.0;
  return psi;
}

void apply_pauli_dense(const PauliString& p, const VectorXcd& in, VectorXcd& out) {
  check_size(p.n_qubits());
  const PauliMasks m = masks_of(p);
  const Eigen::Index dim = in.size();
  out.resize(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const double sign = (std::popcount(ub & m.z) & 1) ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(ub ^ m.x)) = m.prefactor * sign * in(b);
  }
}

Eigen::Index PauliSumApplier::dim() const {
  return Eigen::Index{1} << ham_->n_qubits();
}

void PauliSumApplier::apply(const VectorXcd& in, VectorXcd& out) const {
  out.setZero(in.size());
  const Eigen::Index dim = in.size();
  for (const PauliSum::Term& term : ham_->terms()) {
    const PauliMasks m = masks_of(term.string);
    const Complex pref = term.coefficient * m.prefactor;
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      const double sign = (std::popcount(ub & m.z) & 1) ? -1.0 : 1.0;
      out(static_cast<Eigen::Index>(ub ^ m.x)) += pref * sign * in(b);
    }
  }
}

MatrixXcd densify(const PauliSum& h) {
  const int n = h.n_qubits();
  if (n > 12) throw std::invalid_argument("densify: too many qubits for a dense matrix");
  const Eigen::Index dim = Eigen::Index{1} << n;
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (const PauliSum::Term& term : h.terms()) {
    const PauliMasks masks = masks_of(term.string);
    const Complex pref = term.coefficient * masks.prefactor;
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      const double sign = (std::popcount(ub & masks.z) & 1) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(ub ^ masks.x), b) += pref * sign;
    }
  }
  return m;
}

std::vector<DenseState> exact_evolve(const PauliSum& h, const DenseState& psi0, double dt,
                                     int steps) {
  check_size(h.n_qubits());
  if (psi0.n_qubits != h.n_qubits())
    throw std::invalid_argument("exact_evolve: state and Hamiltonian sizes differ");
  if (steps < 0) throw std::invalid_argument("exact_evolve: negative step count");
  const PauliSumApplier applier(h);
  KrylovParams params;
  params.tolerance = 1e-13;
  params.max_dim = 64;
  std::vector<DenseState> trajectory;
  trajectory.reserve(static_cast<std::size_t>(steps) + 1);
  trajectory.push_back(psi0);
  if (h.size() == 0) {  // H = 0: constant trajectory
    for (int s = 1; s <= steps; ++s) trajectory.push_back(psi0);
    return trajectory;
  }
  DenseState cur = psi0;
  for (int s = 1; s <= steps; ++s) {
    const KrylovResult res = krylov_expm_apply(applier, cur.amplitudes, dt, params);
    cur.amplitudes = res.vec;
    trajectory.push_back(cur);
  }
  return trajectory;
}

double exact_expect(const DenseState& psi, const PauliString& p) {
  if (psi.n_qubits != p.n_qubits())
    throw std::invalid_argument("exact_expect: size mismatch");
  VectorXcd pv;
  apply_pauli_dense(p, psi.amplitudes, pv);
  return psi.amplitudes.dot(pv).real();
}

MatrixXcd dense_clifford_unitary(const CliffordTableau& t) {
  const int n = t.n_qubits();
  if (n > 10)
    throw std::invalid_argument("dense_clifford_unitary: too many qubits");
  const Eigen::Index dim = Eigen::Index{1} << n;
  // |phi> = U|0...0> spans the +1 eigenspace of every Z image; project a
  // basis vector through all stabilizer projectors (I + g)/2.
  VectorXcd phi = VectorXcd::Zero(dim);
  bool seeded = false;
  for (Eigen::Index seed = 0; seed < dim && !seeded; ++seed) {
    phi.setZero();
    phi(seed) = 1.0;
    VectorXcd tmp;
    for (int j = 0; j < n; ++j) {
      apply_pauli_dense(t.z_image(j), phi, tmp);
      phi = 0.5 * (phi + tmp);
    }
    if (phi.norm() > 1e-6) seeded = true;
  }
  if (!seeded) throw std::logic_error("dense_clifford_unitary: projector product vanished");
  phi /= phi.norm();

  MatrixXcd u(dim, dim);
  VectorXcd tmp;
  for (Eigen::Index b = 0; b < dim; ++b) {
    // Column b is (image of X^b)|phi>; build the X string for b.
    PauliString xs(n);
    for (int j = 0; j < n; ++j)
      if (b & (Eigen::Index{1} << (n - 1 - j))) xs.set_x(j, true);
    const PauliString img = conjugate_pauli(t, xs);
    apply_pauli_dense(img, phi, tmp);
    u.col(b) = tmp;
  }
  return u;
}

}  // namespace ctdvp
