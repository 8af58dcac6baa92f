#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ctdvp/oracle.hpp"
#include "dense_ref.hpp"
#include "test_util.hpp"

using namespace ctdvp;

TEST_CASE("densify: single Z, hand-assembled critical Ising n=2") {
  PauliSum hz(1);
  hz.add_term(1.0, PauliString::single_site(1, 0, 'Z'));
  const Eigen::MatrixXcd dz = densify(hz);
  CHECK(dz(0, 0).real() == doctest::Approx(1.0));
  CHECK(dz(1, 1).real() == doctest::Approx(-1.0));
  CHECK(std::abs(dz(0, 1)) + std::abs(dz(1, 0)) < 1e-15);

  const PauliSum ising = build_model_hamiltonian(2, {1.0, 0.0, 0.0, -1.0});
  const Eigen::MatrixXcd expected = dense_ref::from_labels("XX") -
                                    dense_ref::from_labels("ZI") -
                                    dense_ref::from_labels("IZ");
  CHECK((densify(ising) - expected).norm() < 1e-13);
  CHECK((densify(ising) - densify(ising).adjoint()).norm() < 1e-13);
}

TEST_CASE("matrix-free applier agrees with the dense matrix") {
  Rng rng(3);
  const PauliSum h = build_model_hamiltonian(6, {0.8, -0.2, 0.4, 0.9});
  const Eigen::MatrixXcd hd = densify(h);
  const PauliSumApplier applier(h);
  for (int trial = 0; trial < 4; ++trial) {
    const Eigen::VectorXcd v = test_util::random_matrix(rng, 64, 1);
    Eigen::VectorXcd out;
    applier.apply(v, out);
    CHECK((out - hd * v).norm() < 1e-12 * v.norm());
  }
}

TEST_CASE("exact_evolve: H = 0 gives a constant trajectory") {
  const PauliSum h(3);
  const DenseState psi0 = dense_product_state({0, 1, 0});
  const std::vector<DenseState> traj = exact_evolve(h, psi0, 0.1, 5);
  REQUIRE(traj.size() == 6);
  for (const DenseState& s : traj) CHECK((s.amplitudes - psi0.amplitudes).norm() < 1e-15);
}

TEST_CASE("exact_evolve: single-spin precession matches the closed form") {
  PauliSum h(1);
  h.add_term(-1.0, PauliString::single_site(1, 0, 'Z'));
  DenseState plus;
  plus.n_qubits = 1;
  plus.amplitudes = Eigen::VectorXcd::Constant(2, M_SQRT1_2);
  const double dt = 0.05;
  const int steps = 200;
  const std::vector<DenseState> traj = exact_evolve(h, plus, dt, steps);
  for (int m = 0; m <= steps; ++m) {
    const double expected = std::cos(2.0 * m * dt);
    CHECK(exact_expect(traj[static_cast<std::size_t>(m)],
                       PauliString::single_site(1, 0, 'X')) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("exact_evolve: Richardson self-convergence at n=10") {
  const PauliSum h = build_model_hamiltonian(10, {1.0, 0.0, 0.0, -1.0});
  const DenseState psi0 = dense_product_state(std::vector<int>(10, 0));
  const std::vector<DenseState> coarse = exact_evolve(h, psi0, 0.1, 10);
  const std::vector<DenseState> fine = exact_evolve(h, psi0, 0.05, 20);
  CHECK((coarse.back().amplitudes - fine.back().amplitudes).norm() < 1e-9);
}

TEST_CASE("unitarity over 1000 steps") {
  const PauliSum h = build_model_hamiltonian(4, {1.0, 0.5, 0.0, -0.3});
  const std::vector<DenseState> traj =
      exact_evolve(h, dense_product_state({0, 1, 1, 0}), 0.1, 1000);
  CHECK(std::abs(traj.back().amplitudes.norm() - 1.0) < 1e-10);
}

TEST_CASE("exact_expect examples") {
  const DenseState zeros = dense_product_state({0, 0, 0});
  for (int j = 0; j < 3; ++j)
    CHECK(exact_expect(zeros, PauliString::single_site(3, j, 'Z')) == doctest::Approx(1.0));

  DenseState bell;
  bell.n_qubits = 2;
  bell.amplitudes = Eigen::VectorXcd::Zero(4);
  bell.amplitudes(0) = bell.amplitudes(3) = M_SQRT1_2;
  CHECK(exact_expect(bell, PauliString::from_labels("XX")) == doctest::Approx(1.0));
  CHECK(exact_expect(bell, PauliString::from_labels("ZZ")) == doctest::Approx(1.0));
  CHECK(exact_expect(bell, PauliString::from_labels("ZI")) == doctest::Approx(0.0));

  CHECK_THROWS_AS(exact_expect(bell, PauliString::from_labels("ZZZ")), std::invalid_argument);
}

TEST_CASE("cross-check with the MPS expectation path (n=8)") {
  Rng rng(11);
  MPSState st = test_util::random_state(rng, 8, 16);
  DenseState psi;
  psi.n_qubits = 8;
  psi.amplitudes = st.to_dense();
  for (int trial = 0; trial < 10; ++trial) {
    const PauliString p = test_util::random_pauli(rng, 8);
    CHECK(exact_expect(psi, p) == doctest::Approx(st.expect_pauli(p)).epsilon(1e-10));
  }
}

TEST_CASE("conjugated Hamiltonian spectra match (n=4)") {
  Rng rng(13);
  const PauliSum h = build_model_hamiltonian(4, {1.0, 0.0, 0.6, -1.0});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(densify(h));
  const CliffordTableau c = test_util::random_clifford(rng, 4, 10);
  PauliSum rotated(4);
  for (const auto& t : h.terms()) rotated.add_term(t.coefficient, conjugate_pauli(c, t.string));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(densify(rotated));
  CHECK((es.eigenvalues() - es2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("size guards") {
  CHECK_THROWS_AS(dense_product_state(std::vector<int>(15, 0)), std::invalid_argument);
  PauliSum h(13);
  h.add_term(1.0, PauliString::single_site(13, 0, 'Z'));
  CHECK_THROWS_AS(densify(h), std::invalid_argument);
  CHECK_NOTHROW(PauliSumApplier(h).dim());
}
