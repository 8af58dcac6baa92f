#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ctdvp/mps.hpp"
#include "ctdvp/oracle.hpp"
#include "ctdvp/tableau.hpp"
#include "dense_ref.hpp"
#include "test_util.hpp"

using namespace ctdvp;

namespace {

Eigen::Matrix4cd hadamard_on(int which) {
  Eigen::Matrix2cd h2;
  const double s = M_SQRT1_2;
  h2 << s, s, s, -s;
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  return Eigen::Matrix4cd(which == 0 ? dense_ref::kron(h2, id) : dense_ref::kron(id, h2));
}

Eigen::Matrix4cd cnot01_gate() {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  u(0, 0) = u(1, 1) = u(3, 2) = u(2, 3) = 1.0;
  return u;
}

// Dense Schmidt spectrum across a bipartition (left block of `cut` sites).
Eigen::VectorXd dense_schmidt(const Eigen::VectorXcd& psi, int n, int cut) {
  const Eigen::Index rows = Eigen::Index{1} << cut;
  const Eigen::Index cols = Eigen::Index{1} << (n - cut);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = psi(r * cols + c);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues();
}

}  // namespace

TEST_CASE("product_state examples") {
  const MPSState zeros = MPSState::product_state({0, 0, 0, 0}, 16, 0.0);
  for (int j = 0; j < 4; ++j)
    CHECK(zeros.expect_pauli(PauliString::single_site(4, j, 'Z')) == doctest::Approx(1.0));
  const std::vector<Eigen::VectorXd> spectra = zeros.schmidt_profile();
  for (const auto& s : spectra) CHECK(entropy_from_schmidt(s) == doctest::Approx(0.0));

  // Neel |0101>: even sites hold bit 0, odd sites bit 1.
  const MPSState neel = MPSState::product_state({0, 1, 0, 1}, 16, 0.0);
  double total = 0.0;
  for (int j = 0; j < 4; ++j) total += neel.expect_pauli(PauliString::single_site(4, j, 'Z'));
  CHECK(total == doctest::Approx(0.0));
  CHECK(neel.expect_pauli(PauliString::single_site(4, 1, 'Z')) == doctest::Approx(-1.0));
  CHECK(neel.expect_pauli(PauliString::single_site(4, 2, 'Z')) == doctest::Approx(1.0));

  CHECK_THROWS_AS(MPSState::product_state({}, 8, 0.0), std::invalid_argument);
}

TEST_CASE("polarized state energy under the critical Ising Hamiltonian") {
  for (int n : {4, 7}) {
    const MPSState st = MPSState::product_state(std::vector<int>(n, 0), 8, 0.0);
    const PauliSum h = build_model_hamiltonian(n, {1.0, 0.0, 0.0, -1.0});
    double energy = 0.0;
    for (const auto& term : h.terms()) energy += term.coefficient * st.expect_pauli(term.string);
    CHECK(energy == doctest::Approx(-n));
  }
}

TEST_CASE("move_center: no-op, product, dense-vector gauge invariance") {
  MPSState prod = MPSState::product_state({0, 1, 0}, 4, 0.0);
  prod.move_center(0);
  CHECK(prod.center() == 0);
  prod.move_center(2);
  CHECK(prod.max_bond_dim() == 1);

  Rng rng(3);
  MPSState st = test_util::random_state(rng, 6, 64);
  const Eigen::VectorXcd before = st.to_dense();
  for (int target : {5, 2, 0, 3}) {
    st.move_center(target);
    CHECK(st.center() == target);
    for (int site = 0; site < target; ++site) CHECK(st.is_left_isometric(site));
    for (int site = target + 1; site < 6; ++site) CHECK(st.is_right_isometric(site));
    CHECK((st.to_dense() - before).norm() < 1e-12);
  }
  CHECK_THROWS_AS(st.move_center(6), std::invalid_argument);
}

TEST_CASE("apply_two_site_gate: identity, CNOT on |10>, Bell pair") {
  MPSState st = MPSState::product_state({1, 0}, 4, 0.0);
  const TruncationReport identity_report =
      st.apply_two_site_gate(Eigen::Matrix4cd::Identity(), 0, SweepDirection::left_to_right);
  CHECK(identity_report.discarded_weight == doctest::Approx(0.0));
  CHECK(st.expect_pauli(PauliString::from_labels("ZI")) == doctest::Approx(-1.0));
  CHECK(st.expect_pauli(PauliString::from_labels("IZ")) == doctest::Approx(1.0));

  st.move_center(0);
  st.apply_two_site_gate(cnot01_gate(), 0, SweepDirection::left_to_right);
  CHECK(st.expect_pauli(PauliString::from_labels("IZ")) == doctest::Approx(-1.0));  // |11>
  st.move_center(0);
  CHECK(st.bond_entropy(0) == doctest::Approx(0.0));

  MPSState bell = MPSState::product_state({0, 0}, 4, 0.0);
  bell.apply_two_site_gate(hadamard_on(0), 0, SweepDirection::right_to_left);
  bell.apply_two_site_gate(cnot01_gate(), 0, SweepDirection::right_to_left);
  CHECK(bell.bond_entropy(0) == doctest::Approx(std::log(2.0)));
  CHECK(bell.norm() == doctest::Approx(1.0));

  Eigen::Matrix4cd not_unitary = Eigen::Matrix4cd::Identity();
  not_unitary(0, 0) = 2.0;
  CHECK_THROWS_AS(bell.apply_two_site_gate(not_unitary, 0, SweepDirection::left_to_right),
                  std::invalid_argument);
}

TEST_CASE("bond_entropy: GHZ mid-bond against the dense Schmidt oracle") {
  MPSState st = MPSState::product_state({0, 0, 0, 0}, 16, 0.0);
  st.apply_two_site_gate(hadamard_on(0), 0, SweepDirection::left_to_right);
  for (int b = 0; b < 3; ++b) {
    st.move_center(b);
    st.apply_two_site_gate(cnot01_gate(), b, SweepDirection::left_to_right);
  }
  st.move_center(1);
  CHECK(st.bond_entropy(1) == doctest::Approx(std::log(2.0)));

  const Eigen::VectorXd dense = dense_schmidt(st.to_dense(), 4, 2);
  const Eigen::VectorXd mps = st.schmidt_values(1);
  for (Eigen::Index i = 0; i < std::min(dense.size(), mps.size()); ++i)
    CHECK(mps(i) == doctest::Approx(dense(i)).epsilon(1e-10));
}

TEST_CASE("expect_pauli: random state and Pauli vs dense contraction oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    MPSState st = test_util::random_state(rng, 6, 8);
    const Eigen::VectorXcd psi = st.to_dense();
    PauliString p(6);
    for (int pick = 0; pick < 3; ++pick) {
      const int site = static_cast<int>(rng.uniform_index(6));
      p.set_x(site, rng.uniform_index(2) != 0);
      p.set_z(site, rng.uniform_index(2) != 0);
    }
    if (rng.uniform_index(2) != 0) p.flip_sign();
    Eigen::VectorXcd pv;
    apply_pauli_dense(p, psi, pv);
    const double expected = psi.dot(pv).real();
    CHECK(st.expect_pauli(p) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("two_site_theta: norm, reconstruction, purity") {
  MPSState prod = MPSState::product_state({0, 1, 1}, 4, 0.0);
  prod.move_center(1);
  const ThetaTensor theta = prod.two_site_theta(1);
  CHECK(theta.chi_l == 1);
  CHECK(theta.chi_r == 1);
  CHECK(theta.norm() == doctest::Approx(1.0));

  Rng rng(19);
  MPSState st = test_util::random_state(rng, 4, 16);
  st.move_center(1);
  const Eigen::VectorXcd before = st.to_dense();
  const ThetaTensor t2 = st.two_site_theta(1);
  CHECK(t2.norm() == doctest::Approx(1.0));
  // identity commit through the SVD path reproduces the state
  st.apply_two_site_gate(Eigen::Matrix4cd::Identity(), 1, SweepDirection::left_to_right);
  CHECK((st.to_dense() - before).norm() < 1e-12);

  CHECK_THROWS_AS(st.two_site_theta(0), std::logic_error);
}

TEST_CASE("entropy_after_gate agrees with apply-then-measure (no truncation)") {
  Rng rng(29);
  const auto& gates = two_qubit_gate_set();
  for (int trial = 0; trial < 6; ++trial) {
    MPSState st = test_util::random_state(rng, 5, 32);
    const int bond = static_cast<int>(rng.uniform_index(4));
    st.move_center(bond);
    const ThetaTensor theta = st.two_site_theta(bond);

    const Eigen::Matrix4cd u = trial % 2 == 0
                                   ? Eigen::Matrix4cd(test_util::random_unitary(rng, 4))
                                   : gates[rng.uniform_index(720)].unitary;
    const double predicted = entropy_after_gate(theta, u);
    MPSState applied = st;
    applied.apply_two_site_gate(u, bond, SweepDirection::left_to_right);
    applied.move_center(bond);
    CHECK(applied.bond_entropy(bond) == doctest::Approx(predicted).epsilon(1e-12));

    // identity gate reproduces bond_entropy
    CHECK(entropy_after_gate(theta, Eigen::Matrix4cd::Identity()) ==
          doctest::Approx(st.bond_entropy(bond)));
  }
}

TEST_CASE("Bell-pair theta is disentangled by the inverse entangler") {
  MPSState bell = MPSState::product_state({0, 0}, 4, 0.0);
  bell.apply_two_site_gate(hadamard_on(0), 0, SweepDirection::right_to_left);
  bell.apply_two_site_gate(cnot01_gate(), 0, SweepDirection::right_to_left);
  const ThetaTensor theta = bell.two_site_theta(0);
  const Eigen::Matrix4cd inverse = (cnot01_gate() * hadamard_on(0)).adjoint();
  CHECK(entropy_after_gate(theta, inverse) == doctest::Approx(0.0));
}

TEST_CASE("unitary gates preserve norm and conjugated expectations (n<=6)") {
  Rng rng(41);
  const auto& gates = two_qubit_gate_set();
  for (int trial = 0; trial < 6; ++trial) {
    MPSState st = test_util::random_state(rng, 6, 64);
    const int bond = static_cast<int>(rng.uniform_index(5));
    const TwoQubitGate& g = gates[rng.uniform_index(720)];
    const PauliString p = test_util::random_pauli(rng, 6);

    const double before = st.expect_pauli(p);
    st.move_center(bond);
    st.apply_two_site_gate(g.unitary, bond, SweepDirection::left_to_right);
    CHECK(st.norm() == doctest::Approx(1.0));
    const PauliString image = conjugate_pauli(embed(g.tableau, bond, 6), p);
    CHECK(st.expect_pauli(image) == doctest::Approx(before).epsilon(1e-10));
  }
}

TEST_CASE("truncation: discarded weight is zero within rank, reported beyond") {
  Rng rng(53);
  MPSState small = test_util::random_state(rng, 4, 4, 1);
  small.move_center(1);
  const TruncationReport r0 =
      small.apply_two_site_gate(Eigen::Matrix4cd(test_util::random_unitary(rng, 4)), 1,
                                SweepDirection::left_to_right);
  CHECK(r0.new_dim <= 4);
  CHECK(r0.discarded_weight < 1e-20);  // theta rank never exceeded chi_max

  // force truncation: entangle heavily at chi_max 2
  MPSState tight = MPSState::product_state({0, 0, 0, 0}, 2, 0.0);
  tight.pad_bond_dimensions(2);
  double discarded = 0.0;
  for (int layer = 0; layer < 3; ++layer)
    for (int b = 0; b < 3; ++b) {
      tight.move_center(b);
      const TruncationReport r = tight.apply_two_site_gate(
          Eigen::Matrix4cd(test_util::random_unitary(rng, 4)), b, SweepDirection::left_to_right);
      CHECK(r.new_dim <= 2);
      discarded += r.discarded_weight;
    }
  CHECK(discarded > 0.0);
  CHECK(tight.norm() == doctest::Approx(1.0));  // renormalized after truncation
}

TEST_CASE("entropy is invariant under the 16 sign Paulis") {
  Rng rng(61);
  const auto& gates = two_qubit_gate_set();
  MPSState st = test_util::random_state(rng, 4, 16);
  st.move_center(1);
  const ThetaTensor theta = st.two_site_theta(1);
  const Eigen::Matrix4cd u = gates[rng.uniform_index(720)].unitary;
  const double base = entropy_after_gate(theta, u);
  for (int idx = 0; idx < 16; ++idx) {
    const Eigen::Matrix4cd pu =
        Eigen::Matrix4cd(dense_pauli(two_qubit_pauli_from_index(idx))) * u;
    CHECK(std::abs(entropy_after_gate(theta, pu) - base) < 1e-12);
  }
}

TEST_CASE("pad_bond_dimensions preserves the state and installs headroom") {
  MPSState st = MPSState::product_state({0, 1, 0, 1, 0}, 8, 0.0);
  const Eigen::VectorXcd before = st.to_dense();
  st.pad_bond_dimensions(8);
  CHECK((st.to_dense() - before).norm() < 1e-12);
  CHECK(st.bond_dim(0) == 2);
  CHECK(st.bond_dim(1) == 4);
  CHECK(st.bond_dim(2) == 4);
  CHECK(st.bond_dim(3) == 2);
  CHECK(st.norm() == doctest::Approx(1.0));
  for (int site = 1; site < 5; ++site) CHECK(st.is_right_isometric(site));
}

TEST_CASE("schmidt_profile matches per-bond schmidt_values") {
  Rng rng(71);
  MPSState st = test_util::random_state(rng, 6, 32);
  st.move_center(3);
  const std::vector<Eigen::VectorXd> profile = st.schmidt_profile();
  REQUIRE(profile.size() == 5);
  for (int bond = 0; bond < 5; ++bond) {
    MPSState moved = st;
    moved.move_center(bond);
    const Eigen::VectorXd direct = moved.schmidt_values(bond);
    REQUIRE(profile[static_cast<std::size_t>(bond)].size() >= direct.size());
    for (Eigen::Index i = 0; i < direct.size(); ++i)
      CHECK(profile[static_cast<std::size_t>(bond)](i) ==
            doctest::Approx(direct(i)).epsilon(1e-10));
  }
}
