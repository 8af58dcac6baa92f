#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ctdvp/oracle.hpp"
#include "ctdvp/tdvp.hpp"
#include "dense_ref.hpp"
#include "test_util.hpp"

using namespace ctdvp;

namespace {

struct DenseMap : LinearMap {
  Eigen::MatrixXcd m;
  explicit DenseMap(Eigen::MatrixXcd mat) : m(std::move(mat)) {}
  Eigen::Index dim() const override { return m.rows(); }
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const override { out = m * in; }
};

Eigen::VectorXcd dense_expm_apply(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& v,
                                  std::complex<double> tau) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * v;
  Eigen::VectorXcd scaled(coeffs.size());
  const std::complex<double> minus_i_tau = std::complex<double>(0, -1) * tau;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    scaled(i) = coeffs(i) * std::exp(minus_i_tau * es.eigenvalues()(i));
  return es.eigenvectors() * scaled;
}

}  // namespace

TEST_CASE("krylov: scalar operator is exact") {
  const double lambda = 0.7321;
  DenseMap op(lambda * Eigen::MatrixXcd::Identity(5, 5));
  Rng rng(1);
  const Eigen::VectorXcd v = test_util::random_matrix(rng, 5, 1);
  const KrylovResult r = krylov_expm_apply(op, v, 0.31, {});
  const Eigen::VectorXcd expected = std::exp(std::complex<double>(0, -1) * 0.31 * lambda) * v;
  CHECK((r.vec - expected).norm() < 1e-13);
  CHECK(r.converged);
}

TEST_CASE("krylov: single-qubit field matches the closed-form phase") {
  DenseMap op(-dense_ref::sigma('Z'));
  Eigen::VectorXcd v(2);
  v << std::complex<double>(0.6, 0.0), std::complex<double>(0.0, 0.8);
  for (double dt : {0.1, 1.7}) {
    const KrylovResult r = krylov_expm_apply(op, v, dt, {});
    Eigen::VectorXcd expected(2);
    expected << v(0) * std::exp(std::complex<double>(0, dt)),
        v(1) * std::exp(std::complex<double>(0, -dt));
    CHECK((r.vec - expected).norm() < 1e-12);
  }
}

TEST_CASE("krylov: random 64-dim Hermitian vs dense exponential oracle") {
  Rng rng(9);
  const Eigen::MatrixXcd h = test_util::random_hermitian(rng, 64);
  const Eigen::VectorXcd v = test_util::random_matrix(rng, 64, 1);
  DenseMap op(h);
  for (double tau : {0.05, 0.5}) {
    const KrylovResult r = krylov_expm_apply(op, v, tau, {});
    const Eigen::VectorXcd expected = dense_expm_apply(h, v, tau);
    CHECK((r.vec - expected).norm() / v.norm() < 1e-10);
    CHECK(std::abs(r.vec.norm() - v.norm()) < 1e-12 * v.norm());
  }
  CHECK_THROWS_AS(krylov_expm_apply(op, Eigen::VectorXcd::Zero(64), 0.1, {}),
                  std::invalid_argument);
}

TEST_CASE("tdvp_sweep with dt_half = 0 leaves the state unchanged") {
  Rng rng(2);
  const PauliSum h = build_model_hamiltonian(5, {1.0, 0.0, 0.0, -1.0});
  MPSState st = MPSState::product_state({0, 1, 0, 1, 0}, 4, 0.0);
  st.pad_bond_dimensions(4);
  const Eigen::VectorXcd before = st.to_dense();
  Environments envs(st, h);
  tdvp_step(st, envs, 0.0);
  CHECK((st.to_dense() - before).norm() < 1e-13);
}

TEST_CASE("N=2: one symmetric step reproduces the dense propagator") {
  Rng rng(3);
  const Eigen::MatrixXcd hd = densify(build_model_hamiltonian(2, {0.9, -0.6, 0.0, 0.8}));
  for (double dt : {0.1, 0.05, 0.025}) {
    MPSState st = MPSState::product_state({0, 1}, 2, 0.0);
    st.pad_bond_dimensions(2);
    Environments envs(st, build_model_hamiltonian(2, {0.9, -0.6, 0.0, 0.8}));
    tdvp_step(st, envs, dt);
    const Eigen::VectorXcd expected =
        dense_expm_apply(hd, dense_product_state({0, 1}).amplitudes, dt);
    const double err = (st.to_dense() - expected).norm();
    CHECK(err < 10 * dt * dt * dt);
  }
}

TEST_CASE("field-only Hamiltonian is exact at bond dimension 1") {
  const PauliSum h = build_model_hamiltonian(4, {0.0, 0.0, 0.0, -0.9});
  MPSState st = MPSState::product_state({0, 1, 1, 0}, 1, 0.0);
  Environments envs(st, h);
  const double dt = 0.37;
  for (int step = 0; step < 3; ++step) tdvp_step(st, envs, dt);
  const std::vector<DenseState> exact =
      exact_evolve(h, dense_product_state({0, 1, 1, 0}), dt, 3);
  CHECK((st.to_dense() - exact.back().amplitudes).norm() < 1e-12);
  CHECK(st.max_bond_dim() == 1);
}

TEST_CASE("norm and energy are conserved over many steps") {
  const PauliSum h = build_model_hamiltonian(4, {1.0, 0.0, 0.0, -1.0});
  MPSState st = MPSState::product_state({0, 0, 0, 0}, 4, 0.0);
  st.pad_bond_dimensions(4);  // chi exact: no truncation anywhere
  Environments envs(st, h);
  double e0 = 0.0;
  bool first = true;
  double worst_norm = 0.0, worst_energy = 0.0;
  for (int step = 0; step < 100; ++step) {
    const TdvpStepReport rep = tdvp_step(st, envs, 0.05);
    if (first) {
      e0 = rep.energy_before;
      first = false;
    }
    worst_norm = std::max(worst_norm, rep.norm_drift);
    worst_energy = std::max(worst_energy, std::abs(rep.energy_after - e0));
  }
  CHECK(worst_norm < 1e-8);
  CHECK(worst_energy < 1e-8);
  CHECK(std::abs(st.norm() - 1.0) < 1e-8);
}

TEST_CASE("magnetization trajectory matches the dense oracle (chi exact)") {
  const int n = 8;
  const PauliSum h = build_model_hamiltonian(n, {1.0, 0.0, 0.0, -1.0});
  const std::vector<int> bits(n, 0);
  MPSState st = MPSState::product_state(bits, 16, 0.0);
  st.pad_bond_dimensions(16);
  Environments envs(st, h);
  const double dt = 0.01;
  const int steps = 100;
  const std::vector<DenseState> exact = exact_evolve(h, dense_product_state(bits), dt, steps);
  double worst = 0.0;
  for (int m = 1; m <= steps; ++m) {
    tdvp_step(st, envs, dt);
    double mz_mps = 0.0, mz_exact = 0.0;
    for (int j = 0; j < n; ++j) {
      mz_mps += st.expect_pauli(PauliString::single_site(n, j, 'Z'));
      mz_exact += exact_expect(exact[static_cast<std::size_t>(m)],
                               PauliString::single_site(n, j, 'Z'));
    }
    worst = std::max(worst, std::abs(mz_mps - mz_exact) / n);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("tdvp_step requires the center at the starting edge") {
  const PauliSum h = build_model_hamiltonian(4, {1.0, 0.0, 0.0, -1.0});
  MPSState st = MPSState::product_state({0, 0, 0, 0}, 4, 0.0);
  st.move_center(2);
  Environments envs(st, h);
  CHECK_THROWS_AS(tdvp_step(st, envs, 0.1), std::logic_error);
}

TEST_CASE("invalid Krylov parameters are rejected") {
  DenseMap op(Eigen::MatrixXcd::Identity(3, 3));
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(3);
  KrylovParams bad;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(krylov_expm_apply(op, v, 0.1, bad), std::invalid_argument);
  bad = {};
  bad.min_dim = 10;
  bad.max_dim = 5;
  CHECK_THROWS_AS(krylov_expm_apply(op, v, 0.1, bad), std::invalid_argument);
}
