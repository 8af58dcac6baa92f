#include "ctdvp/tdvp.hpp"

#include <cmath>
#include <stdexcept>

namespace ctdvp {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

// exp(-i tau T) e1 for the real symmetric tridiagonal T (alpha, beta).
VectorXcd tridiag_exp_e1(const VectorXd& alpha, const VectorXd& beta, int m, Complex tau) {
  MatrixXd t = MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha(i);
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta(i);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
  const VectorXd& ev = es.eigenvalues();
  const MatrixXd& u = es.eigenvectors();
  VectorXcd out = VectorXcd::Zero(m);
  const Complex minus_i_tau = Complex(0.0, -1.0) * tau;
  for (int k = 0; k < m; ++k) {
    const Complex phase = std::exp(minus_i_tau * ev(k));
    out += phase * u(0, k) * u.col(k).cast<Complex>();
  }
  return out;
}

double energy_at_center(const MPSState& state, const Environments& envs) {
  const EffectiveOperator h = envs.effective_site(state.center());
  const VectorXcd v = state.center_vector();
  VectorXcd hv;
  h.apply(v, hv);
  return v.dot(hv).real();
}

}  // namespace

KrylovResult krylov_expm_apply(const LinearMap& op, const VectorXcd& v, Complex tau,
                               const KrylovParams& params) {
  if (params.tolerance <= 0 || params.min_dim < 1 || params.min_dim > params.max_dim)
    throw std::invalid_argument("krylov_expm_apply: invalid parameters");
  const double beta0 = v.norm();
  if (beta0 == 0.0) throw std::invalid_argument("krylov_expm_apply: zero vector");
  const Eigen::Index n = v.size();
  const int max_dim = static_cast<int>(std::min<Eigen::Index>(params.max_dim, n));

  MatrixXcd basis(n, max_dim);
  VectorXd alpha(max_dim), beta(max_dim);
  basis.col(0) = v / beta0;

  VectorXcd w(n), u;
  int m = 0;
  bool converged = false;
  for (int j = 0; j < max_dim; ++j) {
    op.apply(basis.col(j), w);
    alpha(j) = basis.col(j).dot(w).real();
    w -= alpha(j) * basis.col(j);
    if (j > 0) w -= beta(j - 1) * basis.col(j - 1);
    // Full reorthogonalization; subspaces are tiny.
    for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
    beta(j) = w.norm();
    if (!std::isfinite(alpha(j)) || !std::isfinite(beta(j)))
      throw std::runtime_error("krylov_expm_apply: non-finite values");
    m = j + 1;
    u = tridiag_exp_e1(alpha, beta, m, tau);
    if (beta(j) < 1e-14) {  // happy breakdown: subspace is exact
      converged = true;
      break;
    }
    const double residual = beta(j) * std::abs(u(m - 1));
    if (m >= params.min_dim && residual < params.tolerance) {
      converged = true;
      break;
    }
    if (j + 1 < max_dim) basis.col(j + 1) = w / beta(j);
  }
  KrylovResult result;
  result.vec = beta0 * (basis.leftCols(m) * u);
  result.dim_used = m;
  result.converged = converged;
  return result;
}

TdvpStepReport tdvp_sweep(MPSState& state, Environments& envs, double dt_half,
                          SweepDirection direction, const KrylovParams& params) {
  TdvpStepReport report;
  const int n = state.n_sites();
  const bool ltr = direction == SweepDirection::left_to_right;
  if (state.center() != (ltr ? 0 : n - 1))
    throw std::logic_error("tdvp_sweep: center not at the sweep's starting edge");

  const auto track = [&report](const KrylovResult& r) {
    report.max_krylov_dim_used = std::max(report.max_krylov_dim_used, r.dim_used);
    if (!r.converged) ++report.warnings;
  };

  for (int step = 0; step < n; ++step) {
    const int site = ltr ? step : n - 1 - step;
    {
      const EffectiveOperator h_eff = envs.effective_site(site);
      const KrylovResult res = krylov_expm_apply(h_eff, state.center_vector(), dt_half, params);
      track(res);
      state.set_center_from_vector(res.vec);
      envs.mark_site_dirty(site);
    }
    const bool last = step == n - 1;
    if (last) break;
    const int bond = ltr ? site : site - 1;
    Eigen::MatrixXcd c = state.split_center(direction);
    if (ltr)
      envs.advance_left(state, site);
    else
      envs.advance_right(state, site);
    {
      const EffectiveOperator k_eff = envs.effective_bond(bond);
      const Eigen::Map<const VectorXcd> cvec(c.data(), c.size());
      const KrylovResult res = krylov_expm_apply(k_eff, cvec, -dt_half, params);
      track(res);
      c = Eigen::Map<const Eigen::MatrixXcd>(res.vec.data(), c.rows(), c.cols());
    }
    state.absorb_bond(c, direction);
    envs.mark_site_dirty(ltr ? site + 1 : site - 1);
  }
  return report;
}

TdvpStepReport tdvp_step(MPSState& state, Environments& envs, double dt,
                         const KrylovParams& params) {
  if (state.center() != 0) throw std::logic_error("tdvp_step: center must start at site 0");
  TdvpStepReport report;
  report.energy_before = energy_at_center(state, envs);
  const TdvpStepReport fwd = tdvp_sweep(state, envs, dt / 2, SweepDirection::left_to_right, params);
  const TdvpStepReport bwd = tdvp_sweep(state, envs, dt / 2, SweepDirection::right_to_left, params);
  report.max_krylov_dim_used = std::max(fwd.max_krylov_dim_used, bwd.max_krylov_dim_used);
  report.warnings = fwd.warnings + bwd.warnings;
  report.energy_after = energy_at_center(state, envs);
  report.norm_drift = std::abs(state.center_vector().norm() - 1.0);
  return report;
}

}  // namespace ctdvp
