#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "starsense/branch_pair.hpp"
#include "starsense/star_system.hpp"

namespace starsense {

// ---------------------------------------------------------------------------
// Gate set and the Hadamard -> C-NOT -> wait -> C-NOT sensing protocol,
// expressed on the compressed two-branch representation.
//
// Sign convention: positive b_off advances the phase of the |1> branches,
// i.e. coefficients pick up exp(+i phi) with phi > 0 under positive detuning.
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  double b_off_tesla = 3.13e-6;  // field detuning
  double t_wait_s = 400e-6;      // free-evolution time between the C-NOTs
  bool include_j_during_wait = true;

  void validate() const {
    if (t_wait_s < 0) throw std::invalid_argument("ExperimentConfig: t_wait_s must be >= 0");
  }
};

template <std::floating_point Scalar>
BranchPair<Scalar> apply_hadamard_a(const BranchPair<Scalar>& state) {
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  BranchPair<Scalar> out = state;
  for (int b = 0; b < 2; ++b) {
    const auto x = state.coeffs(0, b);
    const auto y = state.coeffs(1, b);
    out.coeffs(0, b) = (x + y) * inv_sqrt2;
    out.coeffs(1, b) = (x - y) * inv_sqrt2;
  }
  return out;
}

// Flips every B spin iff A = |1>: the reference pattern and its complement
// trade places in the a = 1 row.
template <std::floating_point Scalar>
BranchPair<Scalar> apply_global_cnot(const BranchPair<Scalar>& state) {
  BranchPair<Scalar> out = state;
  std::swap(out.coeffs(1, 0), out.coeffs(1, 1));
  return out;
}

// Phase acquired by the branch (A = a, B pattern of weight w) over time t:
// Zeeman detuning term for every spin in |1>, plus the A-B scalar coupling
// in sigma_z/2 convention. Gammas are MHz/T, hence the 1e6.
template <std::floating_point Scalar = double>
Scalar branch_phase(int a, int weight, const ExperimentConfig& cfg, const StarSystem& system) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar t = static_cast<Scalar>(cfg.t_wait_s);
  const Scalar zeeman_hz = static_cast<Scalar>(cfg.b_off_tesla) * Scalar(1e6) *
                           (Scalar(a) * static_cast<Scalar>(system.gamma_a) +
                            Scalar(weight) * static_cast<Scalar>(system.gamma_b));
  Scalar phase = two_pi * zeeman_hz * t;
  if (cfg.include_j_during_wait) {
    phase += two_pi * static_cast<Scalar>(system.j_coupling) * t *
             (Scalar(a) - Scalar(0.5)) *
             (Scalar(weight) - Scalar(system.n_b) / Scalar(2));
  }
  return phase;
}

template <std::floating_point Scalar>
BranchPair<Scalar> free_evolve(const BranchPair<Scalar>& state, const ExperimentConfig& cfg,
                               const StarSystem& system) {
  cfg.validate();
  BranchPair<Scalar> out = state;
  const int w_ref = state.weight;
  const int w_comp = system.n_b - state.weight;
  for (int a = 0; a < 2; ++a) {
    out.coeffs(a, 0) *= std::polar(Scalar(1), branch_phase<Scalar>(a, w_ref, cfg, system));
    out.coeffs(a, 1) *= std::polar(Scalar(1), branch_phase<Scalar>(a, w_comp, cfg, system));
  }
  return out;
}

// Full protocol on one sector: state after the closing C-NOT.
template <std::floating_point Scalar>
BranchPair<Scalar> protocol_final_state(const BranchPair<Scalar>& state,
                                        const ExperimentConfig& cfg, const StarSystem& system) {
  auto s = apply_hadamard_a(state);
  s = apply_global_cnot(s);
  s = free_evolve(s, cfg, system);
  s = apply_global_cnot(s);
  return s;
}

// A-spin transverse observable of the closed protocol, per line.
template <std::floating_point Scalar = double>
struct LineSignal {
  int weight = 0;           // line index m = initial B-pattern weight
  Scalar lopsidedness = 0;  // ell_gamma of the branch pair this line probes
  std::complex<Scalar> signal{0, 0};

  // Principal value in (-pi, pi]; larger acquired phases wrap.
  Scalar phase() const { return std::arg(signal); }
};

using LineSignald = LineSignal<double>;

// Hadamard -> C-NOT -> free evolution -> C-NOT on every sector; reports the
// A-spin coherence 2 conj(c[0][REF]) c[1][REF], attenuated by any dephasing
// the ensemble has accumulated.
template <std::floating_point Scalar>
std::vector<LineSignal<Scalar>> run_noon_protocol(const SpinEnsemble<Scalar>& ensemble,
                                                  const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<LineSignal<Scalar>> lines;
  lines.reserve(ensemble.components.size());
  for (const auto& comp : ensemble.components) {
    const auto s = protocol_final_state(comp.state, cfg, ensemble.system);
    LineSignal<Scalar> line;
    line.weight = comp.weight;
    line.lopsidedness = line_lopsidedness<Scalar>(comp.weight, ensemble.system);
    line.signal = Scalar(2) * std::conj(s.coeffs(0, 0)) * s.coeffs(1, 0) *
                  comp.coherence_factor;
    lines.push_back(line);
  }
  return lines;
}

// ---------------------------------------------------------------------------
// T_wait sweeps: one protocol run per time point, signals collected per line.
// ---------------------------------------------------------------------------

template <std::floating_point Scalar = double>
struct SweepResult {
  struct Line {
    int weight = 0;
    Scalar lopsidedness = 0;
  };
  Eigen::Vector<Scalar, Eigen::Dynamic> times;  // s, uniform
  std::vector<Line> lines;
  // rows: lines, cols: time points
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> signals;
};

using SweepResultd = SweepResult<double>;

template <std::floating_point Scalar, typename Derived>
SweepResult<Scalar> sweep_t_wait(const SpinEnsemble<Scalar>& ensemble, Scalar b_off_tesla,
                                 const Eigen::DenseBase<Derived>& times) {
  const auto t = times.derived().eval();
  const Eigen::Index n_t = t.size();
  if (n_t < 2) throw std::invalid_argument("sweep_t_wait: need at least two time points");
  const Scalar dt = t[1] - t[0];
  if (!(dt > 0)) throw std::invalid_argument("sweep_t_wait: times must be strictly increasing");
  for (Eigen::Index i = 1; i < n_t; ++i) {
    const Scalar step = t[i] - t[i - 1];
    if (std::abs(step - dt) > Scalar(1e-9) * dt)
      throw std::invalid_argument("sweep_t_wait: non-uniform time grid");
  }

  SweepResult<Scalar> sweep;
  sweep.times = t.template cast<Scalar>();
  const Eigen::Index n_lines = static_cast<Eigen::Index>(ensemble.components.size());
  sweep.lines.reserve(n_lines);
  for (const auto& comp : ensemble.components)
    sweep.lines.push_back({comp.weight, line_lopsidedness<Scalar>(comp.weight, ensemble.system)});
  sweep.signals.resize(n_lines, n_t);

  ExperimentConfig cfg;
  cfg.b_off_tesla = static_cast<double>(b_off_tesla);
  for (Eigen::Index j = 0; j < n_t; ++j) {
    cfg.t_wait_s = static_cast<double>(t[j]);
    const auto lines = run_noon_protocol(ensemble, cfg);
    for (Eigen::Index i = 0; i < n_lines; ++i) sweep.signals(i, j) = lines[i].signal;
  }
  return sweep;
}

}  // namespace starsense
