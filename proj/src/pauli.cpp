#include "ctdvp/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctdvp {

PauliString::PauliString(int n_qubits)
    : n_(n_qubits),
      x_(static_cast<std::size_t>(n_qubits), 0),
      z_(static_cast<std::size_t>(n_qubits), 0) {
  if (n_qubits <= 0) throw std::invalid_argument("PauliString: n_qubits must be positive");
}

PauliString PauliString::from_labels(std::string_view labels, int sign) {
  std::size_t start = 0;
  if (!labels.empty() && (labels[0] == '+' || labels[0] == '-')) {
    if (labels[0] == '-') sign = -sign;
    start = 1;
  }
  if (labels.size() == start) throw std::invalid_argument("PauliString: empty label string");
  PauliString p(static_cast<int>(labels.size() - start));
  for (std::size_t i = start; i < labels.size(); ++i) {
    const int j = static_cast<int>(i - start);
    switch (labels[i]) {
      case 'I': break;
      case 'X': p.set_x(j, true); break;
      case 'Y': p.set_x(j, true); p.set_z(j, true); break;
      case 'Z': p.set_z(j, true); break;
      default:
        throw std::invalid_argument("PauliString: invalid character '" +
                                    std::string(1, labels[i]) + "' at position " +
                                    std::to_string(i));
    }
  }
  p.set_sign(sign);
  return p;
}

PauliString PauliString::single_site(int n_qubits, int site, char op, int sign) {
  PauliString p(n_qubits);
  if (site < 0 || site >= n_qubits) throw std::invalid_argument("PauliString: site out of range");
  switch (op) {
    case 'I': break;
    case 'X': p.set_x(site, true); break;
    case 'Y': p.set_x(site, true); p.set_z(site, true); break;
    case 'Z': p.set_z(site, true); break;
    default: throw std::invalid_argument("PauliString: invalid operator label");
  }
  p.set_sign(sign);
  return p;
}

void PauliString::set_sign(int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("PauliString: sign must be +1 or -1");
  sign_ = s;
}

int PauliString::site_index(int j) const {
  const bool xj = x(j), zj = z(j);
  if (xj && zj) return 2;
  if (xj) return 1;
  if (zj) return 3;
  return 0;
}

char PauliString::site_label(int j) const {
  static constexpr char kLabels[4] = {'I', 'X', 'Y', 'Z'};
  return kLabels[site_index(j)];
}

int PauliString::weight() const {
  int w = 0;
  for (int j = 0; j < n_; ++j) w += (x(j) || z(j)) ? 1 : 0;
  return w;
}

bool PauliString::is_identity() const { return weight() == 0; }

int PauliString::y_count() const {
  int c = 0;
  for (int j = 0; j < n_; ++j) c += (x(j) && z(j)) ? 1 : 0;
  return c;
}

std::string PauliString::labels() const {
  std::string s;
  s.reserve(static_cast<std::size_t>(n_) + 1);
  s.push_back(sign_ > 0 ? '+' : '-');
  for (int j = 0; j < n_; ++j) s.push_back(site_label(j));
  return s;
}

bool PauliString::axes_less(const PauliString& a, const PauliString& b) {
  if (a.z_ != b.z_) return a.z_ < b.z_;
  return a.x_ < b.x_;
}

namespace {

void check_sizes(const PauliString& p, const PauliString& q, const char* what) {
  if (p.n_qubits() != q.n_qubits())
    throw std::invalid_argument(std::string(what) + ": size mismatch (" +
                                std::to_string(p.n_qubits()) + " vs " +
                                std::to_string(q.n_qubits()) + ")");
}

}  // namespace

PhasedPauli multiply_phased(const PauliString& p, const PauliString& q) {
  check_sizes(p, q, "multiply");
  const int n = p.n_qubits();
  PauliString r(n);
  // Raw forms: p = sp * i^(xp.zp) X^xp Z^zp, q likewise. Reordering
  // Z^zp past X^xq costs (-1)^(zp.xq). The result is refolded into the
  // Hermitian convention, leaving a residual i-exponent.
  int exponent = 0;
  for (int j = 0; j < n; ++j) {
    const int xp = p.x(j), zp = p.z(j), xq = q.x(j), zq = q.z(j);
    const int xr = xp ^ xq, zr = zp ^ zq;
    r.set_x(j, xr != 0);
    r.set_z(j, zr != 0);
    exponent += xp * zp + xq * zq + 2 * zp * xq - xr * zr;
  }
  if (p.sign() < 0) exponent += 2;
  if (q.sign() < 0) exponent += 2;
  exponent &= 3;
  return PhasedPauli{std::move(r), exponent};
}

PauliString multiply(const PauliString& p, const PauliString& q) {
  PhasedPauli phased = multiply_phased(p, q);
  if (phased.i_exponent & 1)
    throw std::domain_error("multiply: product " + p.labels() + " * " + q.labels() +
                            " is not Hermitian (i-exponent " +
                            std::to_string(phased.i_exponent) + ")");
  if (phased.i_exponent == 2) phased.string.flip_sign();
  return std::move(phased.string);
}

bool commutes(const PauliString& p, const PauliString& q) {
  check_sizes(p, q, "commutes");
  int acc = 0;
  for (int j = 0; j < p.n_qubits(); ++j)
    acc ^= (p.x(j) & q.z(j)) ^ (p.z(j) & q.x(j));
  return acc == 0;
}

void PauliSum::add_term(double coefficient, const PauliString& s) {
  if (s.n_qubits() != n_) throw std::invalid_argument("PauliSum: size mismatch");
  double c = coefficient * s.sign();
  PauliString axes = s;
  axes.set_sign(+1);
  auto it = std::lower_bound(terms_.begin(), terms_.end(), axes,
                             [](const Term& t, const PauliString& key) {
                               return PauliString::axes_less(t.string, key);
                             });
  if (it != terms_.end() && it->string.same_axes(axes)) {
    it->coefficient += c;
    if (std::abs(it->coefficient) <= kPruneThreshold) terms_.erase(it);
    return;
  }
  if (std::abs(c) <= kPruneThreshold) return;
  terms_.insert(it, Term{c, std::move(axes)});
}

double PauliSum::one_norm() const {
  double s = 0.0;
  for (const Term& t : terms_) s += std::abs(t.coefficient);
  return s;
}

PauliSum build_model_hamiltonian(int n_sites, const ModelParams& params) {
  const int min_sites = params.j2x != 0.0 ? 3 : 2;
  if (n_sites < min_sites)
    throw std::invalid_argument("build_model_hamiltonian: n_sites too small for requested couplings");
  PauliSum h(n_sites);
  for (int j = 0; j + 1 < n_sites; ++j) {
    if (params.j1x != 0.0) {
      PauliString s(n_sites);
      s.set_x(j, true);
      s.set_x(j + 1, true);
      h.add_term(params.j1x, s);
    }
    if (params.j1y != 0.0) {
      PauliString s(n_sites);
      s.set_x(j, true); s.set_z(j, true);
      s.set_x(j + 1, true); s.set_z(j + 1, true);
      h.add_term(params.j1y, s);
    }
  }
  if (params.j2x != 0.0) {
    for (int j = 0; j + 2 < n_sites; ++j) {
      PauliString s(n_sites);
      s.set_x(j, true);
      s.set_x(j + 2, true);
      h.add_term(params.j2x, s);
    }
  }
  if (params.h != 0.0) {
    for (int j = 0; j < n_sites; ++j) {
      PauliString s(n_sites);
      s.set_z(j, true);
      h.add_term(params.h, s);
    }
  }
  return h;
}

}  // namespace ctdvp
