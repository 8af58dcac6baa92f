#pragma once

#include <complex>

#include "ctdvp/envs.hpp"
#include "ctdvp/linear_map.hpp"
#include "ctdvp/mps.hpp"

namespace ctdvp {

struct KrylovParams {
  double tolerance = 1e-12;
  int max_dim = 30;
  int min_dim = 3;
};

struct KrylovResult {
  Eigen::VectorXcd vec;
  int dim_used = 0;
  bool converged = true;
};

// Lanczos approximation of exp(-i * tau * op) v for Hermitian op, with full
// reorthogonalization (local problems are small). Terminates on the standard
// a-posteriori residual estimate or happy breakdown; hitting max_dim is
// reported, not fatal.
KrylovResult krylov_expm_apply(const LinearMap& op, const Eigen::VectorXcd& v,
                               std::complex<double> tau, const KrylovParams& params);

struct TdvpStepReport {
  int max_krylov_dim_used = 0;
  double norm_drift = 0.0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  int warnings = 0;  // local exponentials that hit max_dim
};

// One half-sweep of the single-site scheme: per site, the center tensor is
// evolved forward by dt_half under H^eff, split toward the sweep direction,
// and the bond matrix evolved backward by dt_half under K^eff. Environments
// are advanced incrementally. Requires the center at the sweep's starting
// edge.
TdvpStepReport tdvp_sweep(MPSState& state, Environments& envs, double dt_half,
                          SweepDirection direction, const KrylovParams& params = {});

// Symmetric second-order step: left-to-right at dt/2 then right-to-left at
// dt/2. Requires the center at site 0; returns it there.
TdvpStepReport tdvp_step(MPSState& state, Environments& envs, double dt,
                         const KrylovParams& params = {});

}  // namespace ctdvp
