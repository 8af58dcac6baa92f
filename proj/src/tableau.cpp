#include "ctdvp/tableau.hpp"

#include <cassert>
#include <complex>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace ctdvp {

namespace {

using Complex = std::complex<double>;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

CliffordTableau::CliffordTableau(int n_qubits) : n_(n_qubits) {
  require(n_qubits > 0, "CliffordTableau: n_qubits must be positive");
  rows_.reserve(static_cast<std::size_t>(2 * n_));
  for (int r = 0; r < 2 * n_; ++r) rows_.push_back(generator(r, n_));
}

CliffordTableau CliffordTableau::from_images(std::vector<PauliString> x_images,
                                             std::vector<PauliString> z_images) {
  require(!x_images.empty() && x_images.size() == z_images.size(),
          "CliffordTableau: need equal nonzero numbers of X and Z images");
  CliffordTableau t;
  t.n_ = static_cast<int>(x_images.size());
  t.rows_ = std::move(x_images);
  t.rows_.insert(t.rows_.end(), std::make_move_iterator(z_images.begin()),
                 std::make_move_iterator(z_images.end()));
  for (const PauliString& r : t.rows_)
    require(r.n_qubits() == t.n_, "CliffordTableau: image size mismatch");
  assert(t.is_symplectic());
  return t;
}

CliffordTableau CliffordTableau::pauli_conjugation(const PauliString& p) {
  CliffordTableau t(p.n_qubits());
  for (int r = 0; r < 2 * t.n_; ++r)
    if (!commutes(p, t.rows_[static_cast<std::size_t>(r)]))
      t.rows_[static_cast<std::size_t>(r)].flip_sign();
  return t;
}

PauliString CliffordTableau::generator(int r, int n_qubits) {
  PauliString g(n_qubits);
  if (r < n_qubits)
    g.set_x(r, true);
  else
    g.set_z(r - n_qubits, true);
  return g;
}

bool CliffordTableau::is_symplectic() const {
  for (int r = 0; r < 2 * n_; ++r)
    for (int s = r + 1; s < 2 * n_; ++s) {
      const bool anticommute_expected = (s == r + n_);
      if (commutes(row(r), row(s)) == anticommute_expected) return false;
    }
  return true;
}

bool CliffordTableau::is_identity() const {
  for (int r = 0; r < 2 * n_; ++r) {
    if (rows_[static_cast<std::size_t>(r)].sign() < 0) return false;
    if (!rows_[static_cast<std::size_t>(r)].same_axes(generator(r, n_))) return false;
  }
  return true;
}

namespace {

// Appends one bit to a packed MSB-first byte stream.
struct BitPacker {
  std::string bytes;
  int used = 0;
  void push(bool b) {
    if (used == 0) bytes.push_back('\0');
    if (b) bytes.back() |= static_cast<char>(0x80 >> used);
    used = (used + 1) & 7;
  }
};

}  // namespace

std::string CliffordTableau::symplectic_key() const {
  BitPacker p;
  for (int r = 0; r < 2 * n_; ++r) {
    const PauliString& v = row(r);
    for (int c = 0; c < n_; ++c) p.push(v.x(c));
    for (int c = 0; c < n_; ++c) p.push(v.z(c));
  }
  return p.bytes;
}

std::string CliffordTableau::hex_encode() const {
  BitPacker p;
  for (int r = 0; r < 2 * n_; ++r) {
    const PauliString& v = row(r);
    for (int c = 0; c < n_; ++c) p.push(v.x(c));
    for (int c = 0; c < n_; ++c) p.push(v.z(c));
  }
  for (int r = 0; r < 2 * n_; ++r) p.push(row(r).sign() < 0);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(p.bytes.size() * 2);
  for (unsigned char b : p.bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

PauliString conjugate_pauli(const CliffordTableau& t, const PauliString& p) {
  if (t.n_qubits() != p.n_qubits())
    throw std::invalid_argument("conjugate_pauli: size mismatch");
  const int n = p.n_qubits();
  // C p C^dag = sign(p) * i^(x.z) * prod_j image(X_j)^{x_j} prod_j image(Z_j)^{z_j};
  // the image factors within each product commute pairwise, so this order is
  // exact. The accumulated i-exponent must come out even.
  PauliString acc(n);
  int exponent = p.y_count() + (p.sign() < 0 ? 2 : 0);
  for (int j = 0; j < n; ++j) {
    if (!p.x(j)) continue;
    PhasedPauli m = multiply_phased(acc, t.x_image(j));
    acc = std::move(m.string);
    exponent += m.i_exponent;
  }
  for (int j = 0; j < n; ++j) {
    if (!p.z(j)) continue;
    PhasedPauli m = multiply_phased(acc, t.z_image(j));
    acc = std::move(m.string);
    exponent += m.i_exponent;
  }
  // multiply_phased exponents are already relative to the canonical Hermitian
  // form, so the total must come out even for a Clifford image.
  exponent &= 3;
  assert((exponent & 1) == 0);
  if (exponent == 2) acc.flip_sign();
  return acc;
}

CliffordTableau compose(const CliffordTableau& outer, const CliffordTableau& inner) {
  if (outer.n_qubits() != inner.n_qubits())
    throw std::invalid_argument("compose: size mismatch");
  const int n = outer.n_qubits();
  std::vector<PauliString> ximg, zimg;
  ximg.reserve(static_cast<std::size_t>(n));
  zimg.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) ximg.push_back(conjugate_pauli(outer, inner.x_image(j)));
  for (int j = 0; j < n; ++j) zimg.push_back(conjugate_pauli(outer, inner.z_image(j)));
  return CliffordTableau::from_images(std::move(ximg), std::move(zimg));
}

CliffordTableau invert(const CliffordTableau& t) {
  const int n = t.n_qubits();
  // Symplectic inverse is Lambda M^T Lambda; index swap exchanges the X and Z
  // halves on both rows and columns.
  const auto bit = [&](int r, int c) {
    const PauliString& v = t.row(r);
    return c < n ? v.x(c) : v.z(c - n);
  };
  const auto swap_half = [&](int i) { return i < n ? i + n : i - n; };
  std::vector<PauliString> ximg, zimg;
  for (int r = 0; r < 2 * n; ++r) {
    PauliString v(n);
    for (int c = 0; c < 2 * n; ++c) {
      if (!bit(swap_half(c), swap_half(r))) continue;
      if (c < n)
        v.set_x(c, true);
      else
        v.set_z(c - n, true);
    }
    (r < n ? ximg : zimg).push_back(std::move(v));
  }
  CliffordTableau inv = CliffordTableau::from_images(std::move(ximg), std::move(zimg));
  // Signs: flip row r until conjugating generator r through inv then t is a
  // round trip.
  for (int r = 0; r < 2 * n; ++r) {
    PauliString g = CliffordTableau::generator(r, n);
    PauliString round_trip = conjugate_pauli(t, conjugate_pauli(inv, g));
    assert(round_trip.same_axes(g));
    if (round_trip.sign() < 0) {
      PauliString fixed = inv.row(r);
      fixed.flip_sign();
      std::vector<PauliString> xs, zs;
      for (int k = 0; k < n; ++k) xs.push_back(k == r ? fixed : inv.x_image(k));
      for (int k = 0; k < n; ++k) zs.push_back(k + n == r ? fixed : inv.z_image(k));
      inv = CliffordTableau::from_images(std::move(xs), std::move(zs));
    }
  }
  return inv;
}

CliffordTableau embed(const CliffordTableau& t2, int bond, int n_qubits) {
  require(t2.n_qubits() == 2, "embed: expected a two-qubit tableau");
  require(bond >= 0 && bond + 1 < n_qubits, "embed: bond out of range");
  const auto lift = [&](const PauliString& p2) {
    PauliString p(n_qubits);
    for (int j = 0; j < 2; ++j) {
      p.set_x(bond + j, p2.x(j));
      p.set_z(bond + j, p2.z(j));
    }
    p.set_sign(p2.sign());
    return p;
  };
  std::vector<PauliString> ximg, zimg;
  for (int j = 0; j < n_qubits; ++j) {
    if (j == bond)
      ximg.push_back(lift(t2.x_image(0)));
    else if (j == bond + 1)
      ximg.push_back(lift(t2.x_image(1)));
    else
      ximg.push_back(CliffordTableau::generator(j, n_qubits));
  }
  for (int j = 0; j < n_qubits; ++j) {
    if (j == bond)
      zimg.push_back(lift(t2.z_image(0)));
    else if (j == bond + 1)
      zimg.push_back(lift(t2.z_image(1)));
    else
      zimg.push_back(CliffordTableau::generator(j + n_qubits, n_qubits));
  }
  return CliffordTableau::from_images(std::move(ximg), std::move(zimg));
}

namespace {

// Two-qubit Pauli from a 4-bit code (b0=x0, b1=z0, b2=x1, b3=z1).
PauliString pauli2_from_code(unsigned code) {
  PauliString p(2);
  p.set_x(0, code & 1u);
  p.set_z(0, code & 2u);
  p.set_x(1, code & 4u);
  p.set_z(1, code & 8u);
  return p;
}

}  // namespace

std::vector<CliffordTableau> enumerate_two_qubit_positive() {
  // Generator images are chosen rather than searched: pick the image of X_0
  // among the 15 non-identity Paulis, an anticommuting image of Z_0 (8), then
  // a commuting image pair for the second qubit (3 * 2). 15*8*3*2 = 720.
  std::vector<CliffordTableau> out;
  out.reserve(720);
  for (unsigned a = 1; a < 16; ++a) {
    const PauliString img_x0 = pauli2_from_code(a);
    for (unsigned b = 1; b < 16; ++b) {
      const PauliString img_z0 = pauli2_from_code(b);
      if (commutes(img_x0, img_z0)) continue;
      for (unsigned c = 1; c < 16; ++c) {
        const PauliString img_x1 = pauli2_from_code(c);
        if (!commutes(img_x1, img_x0) || !commutes(img_x1, img_z0)) continue;
        for (unsigned d = 1; d < 16; ++d) {
          const PauliString img_z1 = pauli2_from_code(d);
          if (!commutes(img_z1, img_x0) || !commutes(img_z1, img_z0)) continue;
          if (commutes(img_z1, img_x1)) continue;
          out.push_back(CliffordTableau::from_images({img_x0, img_x1}, {img_z0, img_z1}));
        }
      }
    }
  }
  assert(out.size() == 720);
  return out;
}

namespace {

struct GeneratorGate {
  CliffordTableau tableau;
  Eigen::Matrix4cd unitary;
};

std::vector<GeneratorGate> make_generator_gates() {
  const Complex i(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd h2, s2, id2;
  h2 << s, s, s, -s;
  s2 << 1, 0, 0, i;
  id2 << 1, 0, 0, 1;
  const auto kron2 = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd m;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
    return m;
  };
  const auto tab = [](const char* x0, const char* x1, const char* z0, const char* z1) {
    return CliffordTableau::from_images(
        {PauliString::from_labels(x0), PauliString::from_labels(x1)},
        {PauliString::from_labels(z0), PauliString::from_labels(z1)});
  };
  Eigen::Matrix4cd cx01 = Eigen::Matrix4cd::Zero();
  cx01(0, 0) = cx01(1, 1) = cx01(3, 2) = cx01(2, 3) = 1.0;
  Eigen::Matrix4cd cx10 = Eigen::Matrix4cd::Zero();
  cx10(0, 0) = cx10(3, 1) = cx10(2, 2) = cx10(1, 3) = 1.0;

  std::vector<GeneratorGate> gates;
  gates.push_back({tab("ZI", "IX", "XI", "IZ"), kron2(h2, id2)});   // H on 0
  gates.push_back({tab("XI", "IZ", "ZI", "IX"), kron2(id2, h2)});   // H on 1
  gates.push_back({tab("YI", "IX", "ZI", "IZ"), kron2(s2, id2)});   // S on 0
  gates.push_back({tab("XI", "IY", "ZI", "IZ"), kron2(id2, s2)});   // S on 1
  gates.push_back({tab("XX", "IX", "ZI", "ZZ"), cx01});             // CNOT 0->1
  gates.push_back({tab("XI", "XX", "ZZ", "IZ"), cx10});             // CNOT 1->0
  return gates;
}

struct SynthesisNode {
  std::vector<int> word;  // generator indices, first-applied first
  CliffordTableau tableau;
};

// Breadth-first word table over Sp(4, F2), keyed by symplectic part.
const std::unordered_map<std::string, SynthesisNode>& synthesis_table() {
  static const std::unordered_map<std::string, SynthesisNode> table = [] {
    const std::vector<GeneratorGate> gens = make_generator_gates();
    std::unordered_map<std::string, SynthesisNode> t;
    std::deque<std::string> queue;
    CliffordTableau id(2);
    t.emplace(id.symplectic_key(), SynthesisNode{{}, id});
    queue.push_back(id.symplectic_key());
    while (!queue.empty()) {
      const SynthesisNode node = t.at(queue.front());
      queue.pop_front();
      for (int g = 0; g < static_cast<int>(gens.size()); ++g) {
        CliffordTableau next = compose(gens[static_cast<std::size_t>(g)].tableau, node.tableau);
        std::string key = next.symplectic_key();
        if (t.contains(key)) continue;
        std::vector<int> word = node.word;
        word.push_back(g);
        t.emplace(key, SynthesisNode{std::move(word), std::move(next)});
        queue.push_back(std::move(key));
      }
    }
    assert(t.size() == 720);
    return t;
  }();
  return table;
}

}  // namespace

Eigen::Matrix4cd synthesize_unitary(const CliffordTableau& t) {
  require(t.n_qubits() == 2, "synthesize_unitary: expected a two-qubit tableau");
  static const std::vector<GeneratorGate> gens = make_generator_gates();
  const auto& table = synthesis_table();
  const auto it = table.find(t.symplectic_key());
  if (it == table.end())
    throw std::logic_error("synthesize_unitary: tableau not symplectic");
  const SynthesisNode& node = it->second;

  Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
  for (int g : node.word) u = gens[static_cast<std::size_t>(g)].unitary * u;

  // The word reproduces the symplectic part; any sign mismatch is fixed by a
  // left-multiplied Pauli, which is unique because the generator images span.
  bool found = false;
  for (int idx = 0; idx < 16 && !found; ++idx) {
    const PauliString p = two_qubit_pauli_from_index(idx);
    bool ok = true;
    for (int r = 0; r < 4; ++r) {
      const bool flip = t.row(r).sign() != node.tableau.row(r).sign();
      if (!commutes(p, node.tableau.row(r)) != flip) {
        ok = false;
        break;
      }
    }
    if (ok) {
      if (idx != 0) u = dense_pauli(p) * u;
      found = true;
    }
  }
  if (!found) throw std::logic_error("synthesize_unitary: no sign correction found");

  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (std::abs(u(r, c)) > 1e-8) {
        u *= std::conj(u(r, c)) / std::abs(u(r, c));
        return u;
      }
  throw std::logic_error("synthesize_unitary: zero matrix");
}

const std::vector<TwoQubitGate>& two_qubit_gate_set() {
  static const std::vector<TwoQubitGate> set = [] {
    std::vector<CliffordTableau> tabs = enumerate_two_qubit_positive();
    std::vector<TwoQubitGate> gates;
    gates.reserve(tabs.size());
    for (std::size_t i = 0; i < tabs.size(); ++i) {
      TwoQubitGate g;
      g.unitary = synthesize_unitary(tabs[i]);
      g.tableau = std::move(tabs[i]);
      g.candidate_id = static_cast<int>(i);
      gates.push_back(std::move(g));
    }
    return gates;
  }();
  return set;
}

int identity_candidate_id() {
  static const int id = [] {
    const auto& set = two_qubit_gate_set();
    for (const TwoQubitGate& g : set)
      if (g.tableau.is_identity()) return g.candidate_id;
    throw std::logic_error("identity tableau missing from candidate set");
  }();
  return id;
}

PauliString random_sign_pauli(Rng& rng) {
  return two_qubit_pauli_from_index(static_cast<int>(rng.uniform_index(16)));
}

int two_qubit_pauli_index(const PauliString& p) {
  require(p.n_qubits() == 2, "two_qubit_pauli_index: expected two qubits");
  return 4 * p.site_index(0) + p.site_index(1);
}

PauliString two_qubit_pauli_from_index(int index) {
  require(index >= 0 && index < 16, "two_qubit_pauli_from_index: index out of range");
  static constexpr char kLabels[4] = {'I', 'X', 'Y', 'Z'};
  const char l0 = kLabels[index / 4];
  const char l1 = kLabels[index % 4];
  return PauliString::from_labels(std::string{l0, l1});
}

Eigen::MatrixXcd dense_pauli(const PauliString& p) {
  require(p.n_qubits() <= 12, "dense_pauli: too many qubits for a dense matrix");
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd sigma[4];
  sigma[0] << 1, 0, 0, 1;
  sigma[1] << 0, 1, 1, 0;
  sigma[2] << 0, -i, i, 0;
  sigma[3] << 1, 0, 0, -1;
  // Site 0 is the most significant factor: accumulate kron(m, sigma_j).
  Eigen::MatrixXcd m(1, 1);
  m(0, 0) = static_cast<double>(p.sign());
  for (int j = 0; j < p.n_qubits(); ++j) {
    const Eigen::Matrix2cd& s = sigma[p.site_index(j)];
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        next.block(2 * r, 2 * c, 2, 2) = m(r, c) * s;
    m = std::move(next);
  }
  return m;
}

}  // namespace ctdvp
