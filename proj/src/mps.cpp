#include "ctdvp/mps.hpp"

#include <cassert>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace ctdvp {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

constexpr double kZeroFloor = 1e-28;  // squared-value floor for exact zeros

// Thin QR: M = Q R with Q (rows x k), R (k x cols), k = min(rows, cols).
void thin_qr(const MatrixXcd& m, MatrixXcd& q, MatrixXcd& r) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<MatrixXcd> qr(m);
  q = qr.householderQ() * MatrixXcd::Identity(m.rows(), k);
  r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

// Thin LQ: M = L Q with Q (k x cols) right-isometric.
void thin_lq(const MatrixXcd& m, MatrixXcd& l, MatrixXcd& q) {
  MatrixXcd qt, rt;
  thin_qr(m.adjoint(), qt, rt);
  l = rt.adjoint();
  q = qt.adjoint();
}

int truncation_rank(const VectorXd& sigma, int chi_max, double cutoff) {
  const double total = sigma.squaredNorm();
  const double threshold = std::max(cutoff * total, kZeroFloor);
  int keep = static_cast<int>(sigma.size());
  double tail = 0.0;
  while (keep > 1) {
    const double next = tail + sigma(keep - 1) * sigma(keep - 1);
    if (next > threshold) break;
    tail = next;
    --keep;
  }
  return std::min(keep, chi_max);
}

}  // namespace

double ThetaTensor::norm() const {
  double s = 0.0;
  for (const MatrixXcd& b : blocks) s += b.squaredNorm();
  return std::sqrt(s);
}

MatrixXcd ThetaTensor::assemble() const {
  MatrixXcd m(2 * chi_l, 2 * chi_r);
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      m.block(s1 * chi_l, s2 * chi_r, chi_l, chi_r) = blocks[static_cast<std::size_t>(s1 * 2 + s2)];
  return m;
}

ThetaTensor apply_gate_to_theta(const ThetaTensor& theta, const Eigen::Matrix4cd& u) {
  ThetaTensor out;
  out.chi_l = theta.chi_l;
  out.chi_r = theta.chi_r;
  for (int p = 0; p < 4; ++p) {
    MatrixXcd b = MatrixXcd::Zero(theta.chi_l, theta.chi_r);
    for (int q = 0; q < 4; ++q) {
      const Complex c = u(p, q);
      if (c != 0.0) b.noalias() += c * theta.blocks[static_cast<std::size_t>(q)];
    }
    out.blocks[static_cast<std::size_t>(p)] = std::move(b);
  }
  return out;
}

double entropy_from_schmidt(const VectorXd& lambdas) {
  double total = 0.0, s = 0.0;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    const double p = lambdas(i) * lambdas(i);
    total += p;
    if (p >= 1e-16) s -= p * std::log(p);
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw std::domain_error("entropy_from_schmidt: spectrum not normalized");
  return s;
}

double entropy_after_gate(const ThetaTensor& theta, const Eigen::Matrix4cd& u) {
  const ThetaTensor transformed = apply_gate_to_theta(theta, u);
  Eigen::BDCSVD<MatrixXcd> svd(transformed.assemble());
  return entropy_from_schmidt(svd.singularValues());
}

MPSState MPSState::product_state(const std::vector<int>& bits, int chi_max, double svd_cutoff) {
  if (bits.empty()) throw std::invalid_argument("product_state: empty bit list");
  if (bits.size() < 2) throw std::invalid_argument("product_state: need at least two sites");
  if (chi_max < 1) throw std::invalid_argument("product_state: chi_max must be positive");
  if (svd_cutoff < 0) throw std::invalid_argument("product_state: svd_cutoff must be nonnegative");
  MPSState st;
  st.n_ = static_cast<int>(bits.size());
  st.center_ = 0;
  st.chi_max_ = chi_max;
  st.cutoff_ = svd_cutoff;
  st.a_.resize(bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] != 0 && bits[j] != 1) throw std::invalid_argument("product_state: bits must be 0/1");
    for (int s = 0; s < 2; ++s) {
      st.a_[j][static_cast<std::size_t>(s)] = MatrixXcd::Zero(1, 1);
      if (s == bits[j]) st.a_[j][static_cast<std::size_t>(s)](0, 0) = 1.0;
    }
  }
  return st;
}

int MPSState::bond_dim(int bond) const {
  if (bond < 0 || bond + 1 >= n_) throw std::invalid_argument("bond_dim: bond out of range");
  return static_cast<int>(a_[static_cast<std::size_t>(bond)][0].cols());
}

int MPSState::max_bond_dim() const {
  int m = 1;
  for (int b = 0; b + 1 < n_; ++b) m = std::max(m, bond_dim(b));
  return m;
}

MatrixXcd MPSState::row_stacked(int site) const {
  const auto& t = a_[static_cast<std::size_t>(site)];
  MatrixXcd m(2 * t[0].rows(), t[0].cols());
  m.topRows(t[0].rows()) = t[0];
  m.bottomRows(t[0].rows()) = t[1];
  return m;
}

MatrixXcd MPSState::col_stacked(int site) const {
  const auto& t = a_[static_cast<std::size_t>(site)];
  MatrixXcd m(t[0].rows(), 2 * t[0].cols());
  m.leftCols(t[0].cols()) = t[0];
  m.rightCols(t[0].cols()) = t[1];
  return m;
}

void MPSState::left_normalize_step(int site) {
  MatrixXcd q, r;
  thin_qr(row_stacked(site), q, r);
  const Eigen::Index chi_l = a_[static_cast<std::size_t>(site)][0].rows();
  a_[static_cast<std::size_t>(site)][0] = q.topRows(chi_l);
  a_[static_cast<std::size_t>(site)][1] = q.bottomRows(chi_l);
  for (int s = 0; s < 2; ++s) {
    auto& next = a_[static_cast<std::size_t>(site + 1)][static_cast<std::size_t>(s)];
    next = (r * next).eval();
  }
}

void MPSState::right_normalize_step(int site) {
  MatrixXcd l, q;
  thin_lq(col_stacked(site), l, q);
  const Eigen::Index chi_r = a_[static_cast<std::size_t>(site)][0].cols();
  a_[static_cast<std::size_t>(site)][0] = q.leftCols(chi_r);
  a_[static_cast<std::size_t>(site)][1] = q.rightCols(chi_r);
  for (int s = 0; s < 2; ++s) {
    auto& prev = a_[static_cast<std::size_t>(site - 1)][static_cast<std::size_t>(s)];
    prev = (prev * l).eval();
  }
}

void MPSState::move_center(int target) {
  if (target < 0 || target >= n_) throw std::invalid_argument("move_center: target out of range");
  if (center_ < 0) throw std::logic_error("move_center: state is in bond gauge");
  while (center_ < target) {
    left_normalize_step(center_);
    ++center_;
  }
  while (center_ > target) {
    right_normalize_step(center_);
    --center_;
  }
}

void MPSState::pad_bond_dimensions(int target_chi) {
  if (center_ < 0) throw std::logic_error("pad_bond_dimensions: state is in bond gauge");
  if (target_chi < 1) throw std::invalid_argument("pad_bond_dimensions: target must be positive");
  const auto physical_cap = [&](int bond) {
    // min(2^(bond+1), 2^(n-1-bond)) without overflow
    const int e = std::min({bond + 1, n_ - 1 - bond, 30});
    return 1 << e;
  };
  bool changed = false;
  for (int bond = 0; bond + 1 < n_; ++bond) {
    const int target = std::min(target_chi, physical_cap(bond));
    const int cur = bond_dim(bond);
    if (cur >= target) continue;
    changed = true;
    for (int s = 0; s < 2; ++s) {
      auto& lt = a_[static_cast<std::size_t>(bond)][static_cast<std::size_t>(s)];
      MatrixXcd padded = MatrixXcd::Zero(lt.rows(), target);
      padded.leftCols(lt.cols()) = lt;
      lt = std::move(padded);
      auto& rt = a_[static_cast<std::size_t>(bond + 1)][static_cast<std::size_t>(s)];
      MatrixXcd rpadded = MatrixXcd::Zero(target, rt.cols());
      rpadded.topRows(rt.rows()) = rt;
      rt = std::move(rpadded);
    }
  }
  if (!changed) return;
  // Padding breaks the isometry gauge; a full round trip restores it (the
  // rank-deficient QR factors still have orthonormal columns).
  const int home = center_;
  move_center(n_ - 1);
  move_center(0);
  move_center(home);
}

ThetaTensor MPSState::two_site_theta(int bond) const {
  if (bond < 0 || bond + 1 >= n_) throw std::invalid_argument("two_site_theta: bond out of range");
  if (center_ != bond && center_ != bond + 1)
    throw std::logic_error("two_site_theta: center not adjacent to bond");
  const auto& left = a_[static_cast<std::size_t>(bond)];
  const auto& right = a_[static_cast<std::size_t>(bond + 1)];
  ThetaTensor theta;
  theta.chi_l = static_cast<int>(left[0].rows());
  theta.chi_r = static_cast<int>(right[0].cols());
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      theta.blocks[static_cast<std::size_t>(s1 * 2 + s2)].noalias() =
          left[static_cast<std::size_t>(s1)] * right[static_cast<std::size_t>(s2)];
  return theta;
}

TruncationReport MPSState::apply_two_site_gate(const Eigen::Matrix4cd& u, int bond,
                                               SweepDirection dir) {
  if ((u.adjoint() * u - Eigen::Matrix4cd::Identity()).norm() > 1e-10)
    throw std::invalid_argument("apply_two_site_gate: gate is not unitary");
  const ThetaTensor theta = apply_gate_to_theta(two_site_theta(bond), u);
  Eigen::BDCSVD<MatrixXcd> svd(theta.assemble(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sigma = svd.singularValues();
  const int keep = truncation_rank(sigma, chi_max_, cutoff_);
  const double total = sigma.squaredNorm();
  const double kept = sigma.head(keep).squaredNorm();

  TruncationReport report;
  report.bond = bond;
  report.discarded_weight = std::max(0.0, (total - kept) / total);
  report.new_dim = keep;

  const VectorXd lambda = sigma.head(keep) / std::sqrt(kept);
  MatrixXcd u_part = svd.matrixU().leftCols(keep);
  MatrixXcd v_part = svd.matrixV().leftCols(keep).adjoint();  // keep x 2*chi_r
  if (dir == SweepDirection::left_to_right) {
    v_part = lambda.asDiagonal() * v_part;
    center_ = bond + 1;
  } else {
    u_part = u_part * lambda.asDiagonal();
    center_ = bond;
  }
  const int chi_l = theta.chi_l, chi_r = theta.chi_r;
  a_[static_cast<std::size_t>(bond)][0] = u_part.topRows(chi_l);
  a_[static_cast<std::size_t>(bond)][1] = u_part.bottomRows(chi_l);
  a_[static_cast<std::size_t>(bond + 1)][0] = v_part.leftCols(chi_r);
  a_[static_cast<std::size_t>(bond + 1)][1] = v_part.rightCols(chi_r);
  return report;
}

VectorXd MPSState::schmidt_values(int bond) const {
  if (bond < 0 || bond + 1 >= n_) throw std::invalid_argument("schmidt_values: bond out of range");
  if (center_ == bond) {
    Eigen::BDCSVD<MatrixXcd> svd(row_stacked(bond));
    return svd.singularValues();
  }
  if (center_ == bond + 1) {
    Eigen::BDCSVD<MatrixXcd> svd(col_stacked(bond + 1));
    return svd.singularValues();
  }
  throw std::logic_error("schmidt_values: center not adjacent to bond");
}

double MPSState::bond_entropy(int bond) const { return entropy_from_schmidt(schmidt_values(bond)); }

std::vector<VectorXd> MPSState::schmidt_profile() const {
  if (center_ < 0) throw std::logic_error("schmidt_profile: state is in bond gauge");
  std::vector<VectorXd> spectra(static_cast<std::size_t>(n_ - 1));
  // Rightward: carry S V^H through the right-isometries.
  {
    std::array<MatrixXcd, 2> cur = a_[static_cast<std::size_t>(center_)];
    for (int bond = center_; bond + 1 < n_; ++bond) {
      MatrixXcd m(2 * cur[0].rows(), cur[0].cols());
      m.topRows(cur[0].rows()) = cur[0];
      m.bottomRows(cur[0].rows()) = cur[1];
      Eigen::BDCSVD<MatrixXcd> svd(m, Eigen::ComputeThinV);
      spectra[static_cast<std::size_t>(bond)] = svd.singularValues();
      if (bond + 2 < n_) {
        const MatrixXcd w = svd.singularValues().asDiagonal() * svd.matrixV().adjoint();
        for (int s = 0; s < 2; ++s)
          cur[static_cast<std::size_t>(s)] =
              w * a_[static_cast<std::size_t>(bond + 1)][static_cast<std::size_t>(s)];
      }
    }
  }
  // Leftward: carry U S through the left-isometries.
  {
    std::array<MatrixXcd, 2> cur = a_[static_cast<std::size_t>(center_)];
    for (int bond = center_ - 1; bond >= 0; --bond) {
      MatrixXcd m(cur[0].rows(), 2 * cur[0].cols());
      m.leftCols(cur[0].cols()) = cur[0];
      m.rightCols(cur[0].cols()) = cur[1];
      Eigen::BDCSVD<MatrixXcd> svd(m, Eigen::ComputeThinU);
      spectra[static_cast<std::size_t>(bond)] = svd.singularValues();
      if (bond > 0) {
        const MatrixXcd w = svd.matrixU() * svd.singularValues().asDiagonal();
        for (int s = 0; s < 2; ++s)
          cur[static_cast<std::size_t>(s)] =
              a_[static_cast<std::size_t>(bond)][static_cast<std::size_t>(s)] * w;
      }
    }
  }
  return spectra;
}

double MPSState::expect_pauli(const PauliString& p) const {
  if (p.n_qubits() != n_) throw std::invalid_argument("expect_pauli: size mismatch");
  MatrixXcd env = MatrixXcd::Identity(1, 1);
  const Complex im(0.0, 1.0);
  for (int j = 0; j < n_; ++j) {
    const auto& t = a_[static_cast<std::size_t>(j)];
    MatrixXcd next = MatrixXcd::Zero(t[0].cols(), t[0].cols());
    const bool xj = p.x(j), zj = p.z(j);
    for (int s = 0; s < 2; ++s) {
      const int sp = xj ? 1 - s : s;
      Complex f = 1.0;
      if (xj && zj)
        f = (s == 0) ? im : -im;
      else if (zj)
        f = (s == 0) ? 1.0 : -1.0;
      next.noalias() +=
          f * (t[static_cast<std::size_t>(sp)].adjoint() * env * t[static_cast<std::size_t>(s)]);
    }
    env = std::move(next);
  }
  const Complex val = static_cast<double>(p.sign()) * env(0, 0);
  assert(std::abs(val.imag()) < 1e-8);
  return val.real();
}

double MPSState::norm() const {
  MatrixXcd env = MatrixXcd::Identity(1, 1);
  for (int j = 0; j < n_; ++j) {
    const auto& t = a_[static_cast<std::size_t>(j)];
    MatrixXcd next = MatrixXcd::Zero(t[0].cols(), t[0].cols());
    for (int s = 0; s < 2; ++s)
      next.noalias() += t[static_cast<std::size_t>(s)].adjoint() * env * t[static_cast<std::size_t>(s)];
    env = std::move(next);
  }
  return std::sqrt(std::abs(env(0, 0).real()));
}

VectorXcd MPSState::to_dense() const {
  if (n_ > 16) throw std::invalid_argument("to_dense: chain too long for a dense vector");
  MatrixXcd b = MatrixXcd::Ones(1, 1);
  for (int j = 0; j < n_; ++j) {
    const auto& t = a_[static_cast<std::size_t>(j)];
    const Eigen::Index rows = b.rows();
    MatrixXcd next(2 * rows, t[0].cols());
    const MatrixXcd c0 = b * t[0];
    const MatrixXcd c1 = b * t[1];
    for (Eigen::Index r = 0; r < rows; ++r) {
      next.row(2 * r) = c0.row(r);
      next.row(2 * r + 1) = c1.row(r);
    }
    b = std::move(next);
  }
  return VectorXcd(b.col(0));
}

VectorXcd MPSState::center_vector() const {
  if (center_ < 0) throw std::logic_error("center_vector: state is in bond gauge");
  const auto& t = a_[static_cast<std::size_t>(center_)];
  const Eigen::Index block = t[0].size();
  VectorXcd v(2 * block);
  v.head(block) = Eigen::Map<const VectorXcd>(t[0].data(), block);
  v.tail(block) = Eigen::Map<const VectorXcd>(t[1].data(), block);
  return v;
}

void MPSState::set_center_from_vector(const VectorXcd& v) {
  if (center_ < 0) throw std::logic_error("set_center_from_vector: state is in bond gauge");
  auto& t = a_[static_cast<std::size_t>(center_)];
  const Eigen::Index block = t[0].size();
  if (v.size() != 2 * block)
    throw std::invalid_argument("set_center_from_vector: size mismatch");
  t[0] = Eigen::Map<const MatrixXcd>(v.data(), t[0].rows(), t[0].cols());
  t[1] = Eigen::Map<const MatrixXcd>(v.data() + block, t[1].rows(), t[1].cols());
}

MatrixXcd MPSState::split_center(SweepDirection dir) {
  if (center_ < 0) throw std::logic_error("split_center: already in bond gauge");
  const int site = center_;
  MatrixXcd bond_matrix;
  if (dir == SweepDirection::left_to_right) {
    if (site + 1 >= n_) throw std::logic_error("split_center: no bond to the right");
    MatrixXcd q;
    thin_qr(row_stacked(site), q, bond_matrix);
    const Eigen::Index chi_l = a_[static_cast<std::size_t>(site)][0].rows();
    a_[static_cast<std::size_t>(site)][0] = q.topRows(chi_l);
    a_[static_cast<std::size_t>(site)][1] = q.bottomRows(chi_l);
  } else {
    if (site == 0) throw std::logic_error("split_center: no bond to the left");
    MatrixXcd q;
    thin_lq(col_stacked(site), bond_matrix, q);
    const Eigen::Index chi_r = a_[static_cast<std::size_t>(site)][0].cols();
    a_[static_cast<std::size_t>(site)][0] = q.leftCols(chi_r);
    a_[static_cast<std::size_t>(site)][1] = q.rightCols(chi_r);
  }
  split_site_ = site;
  center_ = -1;
  return bond_matrix;
}

void MPSState::absorb_bond(const MatrixXcd& c, SweepDirection dir) {
  if (center_ != -1) throw std::logic_error("absorb_bond: not in bond gauge");
  if (dir == SweepDirection::left_to_right) {
    const int next = split_site_ + 1;
    for (int s = 0; s < 2; ++s) {
      auto& t = a_[static_cast<std::size_t>(next)][static_cast<std::size_t>(s)];
      t = (c * t).eval();
    }
    center_ = next;
  } else {
    const int prev = split_site_ - 1;
    for (int s = 0; s < 2; ++s) {
      auto& t = a_[static_cast<std::size_t>(prev)][static_cast<std::size_t>(s)];
      t = (t * c).eval();
    }
    center_ = prev;
  }
  split_site_ = -1;
}

bool MPSState::is_left_isometric(int site, double tol) const {
  const auto& t = a_[static_cast<std::size_t>(site)];
  const MatrixXcd g = t[0].adjoint() * t[0] + t[1].adjoint() * t[1];
  return (g - MatrixXcd::Identity(g.rows(), g.cols())).norm() < tol;
}

bool MPSState::is_right_isometric(int site, double tol) const {
  const auto& t = a_[static_cast<std::size_t>(site)];
  const MatrixXcd g = t[0] * t[0].adjoint() + t[1] * t[1].adjoint();
  return (g - MatrixXcd::Identity(g.rows(), g.cols())).norm() < tol;
}

}  // namespace ctdvp
