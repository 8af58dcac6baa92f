#include "ctdvp/dressed.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ctdvp {

int EvolutionConfig::steps() const {
  return static_cast<int>(std::floor(t_final / dt + 1e-9));
}

void EvolutionConfig::validate() const {
  if (n < 2) throw std::invalid_argument("config: n must be at least 2");
  if (chi_max < 1) throw std::invalid_argument("config: chi_max must be positive");
  if (svd_cutoff < 0) throw std::invalid_argument("config: svd_cutoff must be nonnegative");
  if (dt <= 0) throw std::invalid_argument("config: dt must be positive");
  if (t_final < dt) throw std::invalid_argument("config: t_final must be at least dt");
  if (cool_every < 0) throw std::invalid_argument("config: cool_every must be nonnegative");
  if (d_layers < 0) throw std::invalid_argument("config: d_layers must be nonnegative");
  if (tie_tolerance < 0) throw std::invalid_argument("config: tie_tolerance must be nonnegative");
  if (static_cast<int>(initial_bits.size()) != n)
    throw std::invalid_argument("config: initial_state length must equal n");
  for (int b : initial_bits)
    if (b != 0 && b != 1) throw std::invalid_argument("config: initial_state bits must be 0/1");
  if (model.j2x != 0.0 && n < 3)
    throw std::invalid_argument("config: model.j2x requires n >= 3");
  for (const ObservableSpec& o : observables) {
    if (o.mode == ObservableSpec::Mode::single && o.pauli.n_qubits() != n)
      throw std::invalid_argument("config: observable '" + o.name + "' has wrong length");
    if (o.mode == ObservableSpec::Mode::site_average && o.site_op != 'X' && o.site_op != 'Y' &&
        o.site_op != 'Z')
      throw std::invalid_argument("config: observable '" + o.name + "' has invalid site op");
  }
}

std::vector<ObservableSpec> EvolutionConfig::resolved_observables() const {
  if (!observables.empty()) return observables;
  std::vector<ObservableSpec> defaults;
  ObservableSpec avg;
  avg.name = "avg_sz";
  avg.mode = ObservableSpec::Mode::site_average;
  avg.site_op = 'Z';
  defaults.push_back(avg);
  ObservableSpec mid;
  mid.name = "sz_" + std::to_string(n / 2);
  mid.mode = ObservableSpec::Mode::single;
  mid.pauli = PauliString::single_site(n, n / 2, 'Z');
  defaults.push_back(mid);
  return defaults;
}

PauliSum conjugate_hamiltonian(const PauliSum& h, const CliffordTableau& c) {
  if (h.n_qubits() != c.n_qubits())
    throw std::invalid_argument("conjugate_hamiltonian: size mismatch");
  PauliSum out(h.n_qubits());
  for (const PauliSum::Term& term : h.terms())
    out.add_term(term.coefficient, conjugate_pauli(c, term.string));
  if (out.size() != h.size())
    throw std::logic_error("conjugate_hamiltonian: term count changed");
  return out;
}

PauliString transform_observable(const PauliString& p, const CliffordTableau& accumulated) {
  return conjugate_pauli(accumulated, p);
}

namespace {

double measure_observable(const MPSState& state, const ObservableSpec& obs,
                          const CliffordTableau& accumulated) {
  const int n = state.n_sites();
  if (obs.mode == ObservableSpec::Mode::single)
    return state.expect_pauli(transform_observable(obs.pauli, accumulated));
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const PauliString p = PauliString::single_site(n, j, obs.site_op);
    sum += state.expect_pauli(transform_observable(p, accumulated));
  }
  return sum / n;
}

}  // namespace

EvolutionResult run_dressed_evolution(const EvolutionConfig& config) {
  return run_dressed_evolution(config, StepObserver{});
}

EvolutionResult run_dressed_evolution(const EvolutionConfig& config, const StepObserver& observer) {
  config.validate();
  const int n = config.n;
  const std::vector<ObservableSpec> observables = config.resolved_observables();

  MPSState state = MPSState::product_state(config.initial_bits, config.chi_max, config.svd_cutoff);
  // The single-site integrator cannot grow bonds, so the working bond
  // dimension is installed up front by zero padding.
  state.pad_bond_dimensions(config.chi_max);
  PauliSum hamiltonian = build_model_hamiltonian(n, config.model);
  Environments envs(state, hamiltonian);
  CliffordTableau accumulated(n);
  Rng rng(config.rng_seed);

  CoolingConfig cooling;
  cooling.d_layers = config.d_layers;
  cooling.tie_tolerance = config.tie_tolerance;
  cooling.entropy_floor = config.entropy_floor;

  TrajectoryRecord trajectory;
  for (const ObservableSpec& o : observables) trajectory.observable_names.push_back(o.name);

  double discarded_cum = 0.0;
  const int mid = midpoint_bond(n);

  // <H_m> from the current environments; valid whenever the center is home.
  const auto energy_now = [&] {
    const EffectiveOperator h_eff = envs.effective_site(state.center());
    const Eigen::VectorXcd v = state.center_vector();
    Eigen::VectorXcd hv;
    h_eff.apply(v, hv);
    return v.dot(hv).real();
  };

  const auto record_step = [&](int m, bool cooled, double wall_ms) {
    StepRecord rec;
    rec.step = m;
    rec.t = m * config.dt;
    rec.cooled = cooled;
    rec.wall_ms = wall_ms;
    rec.energy = energy_now();
    for (const ObservableSpec& o : observables)
      rec.observables.push_back(measure_observable(state, o, accumulated));
    const std::vector<Eigen::VectorXd> spectra = state.schmidt_profile();
    rec.entropy_mid = entropy_from_schmidt(spectra[static_cast<std::size_t>(mid)]);
    if (config.record_entropy_profile)
      for (const Eigen::VectorXd& s : spectra) rec.entropy_profile.push_back(entropy_from_schmidt(s));
    rec.max_chi = state.max_bond_dim();
    rec.discarded_cum = discarded_cum;
    trajectory.steps.push_back(std::move(rec));
  };

  record_step(0, false, 0.0);
  if (observer) observer(0, state, accumulated);

  const int total_steps = config.steps();
  for (int m = 1; m <= total_steps; ++m) {
    const auto t0 = std::chrono::steady_clock::now();
    const TdvpStepReport report = tdvp_step(state, envs, config.dt, config.krylov);
    trajectory.warnings += report.warnings;

    bool cooled = false;
    if (config.cool_every > 0 && m % config.cool_every == 0) {
      CoolingResult cr = cooling_sweep(state, cooling, rng);
      for (GateRecord& g : cr.report.gates) {
        g.step = m;
        discarded_cum += g.discarded_weight;
        trajectory.cooling_gates.push_back(g);
      }
      hamiltonian = conjugate_hamiltonian(hamiltonian, cr.accumulated);
      accumulated = compose(cr.accumulated, accumulated);
      // Gate commits truncate away exact-zero Schmidt directions; restore the
      // padding headroom before the next TDVP step.
      state.pad_bond_dimensions(config.chi_max);
      envs.reset(state, hamiltonian);
      trajectory.tableau_log.push_back(
          {m, cr.report.accumulated_tableau_hex, accumulated.hex_encode()});
      cooled = true;
    }

    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    record_step(m, cooled, wall_ms);
    if (observer) observer(m, state, accumulated);
  }

  return EvolutionResult{std::move(trajectory), std::move(state), std::move(accumulated)};
}

ErrorSeries integrated_error(const std::vector<double>& times, const std::vector<double>& approx,
                             const std::vector<double>& exact) {
  if (times.size() != approx.size() || times.size() != exact.size() || times.empty())
    throw std::invalid_argument("integrated_error: series lengths differ");
  if (std::abs(times.front()) > 1e-12)
    throw std::invalid_argument("integrated_error: time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dt0 = times[1] - times[0];
    if (std::abs((times[i] - times[i - 1]) - dt0) > 1e-9 * std::max(1.0, dt0))
      throw std::invalid_argument("integrated_error: time grid not uniform");
  }
  ErrorSeries out;
  out.times = times;
  out.epsilon.resize(times.size());
  out.epsilon[0] = std::abs(approx[0] - exact[0]);
  double integral = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dt = times[i] - times[i - 1];
    integral += 0.5 * dt * (std::abs(approx[i - 1] - exact[i - 1]) + std::abs(approx[i] - exact[i]));
    out.epsilon[i] = integral / times[i];
  }
  out.epsilon_T = out.epsilon.back();
  return out;
}

}  // namespace ctdvp
