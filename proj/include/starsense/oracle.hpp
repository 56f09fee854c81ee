#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <stdexcept>

#include "starsense/branch_pair.hpp"
#include "starsense/gates.hpp"
#include "starsense/star_system.hpp"

namespace starsense {

// ---------------------------------------------------------------------------
// Brute-force state-vector oracle. Basis index: A bit at position n_b
// (most significant), B spin k at bit position n_b-1-k. Dimension 2^(n_b+1),
// capped at n_b = 12. Everything here is written against explicit one- and
// two-qubit operations so the compressed path is validated independently.
// ---------------------------------------------------------------------------

inline constexpr int kOracleMaxB = 12;

template <std::floating_point Scalar = double>
using FullState = Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>;

inline void check_oracle_dim(int n_b) {
  if (n_b < 1 || n_b > kOracleMaxB)
    throw std::invalid_argument("oracle: n_b exceeds the dimension cap (1..12)");
}

template <std::floating_point Scalar = double>
FullState<Scalar> make_ground_full(std::uint32_t pattern, const StarSystem& system) {
  check_oracle_dim(system.n_b);
  if (pattern >> system.n_b)
    throw std::invalid_argument("oracle: pattern has bits outside the B register");
  FullState<Scalar> psi = FullState<Scalar>::Zero(Eigen::Index(1) << (system.n_b + 1));
  psi[pattern] = std::complex<Scalar>(1);
  return psi;
}

// Embeds the four branch amplitudes of a compressed state at the matching
// basis indices; everything else zero.
template <std::floating_point Scalar>
FullState<Scalar> sector_to_full(const BranchPair<Scalar>& state, std::uint32_t pattern,
                                 const StarSystem& system) {
  check_oracle_dim(system.n_b);
  if (static_cast<int>(std::popcount(pattern)) != state.weight)
    throw std::invalid_argument("sector_to_full: pattern weight does not match state weight");
  if (pattern >> system.n_b)
    throw std::invalid_argument("sector_to_full: pattern has bits outside the B register");
  const std::uint32_t mask = (std::uint32_t(1) << system.n_b) - 1;
  const std::uint32_t comp = ~pattern & mask;
  const Eigen::Index a_bit = Eigen::Index(1) << system.n_b;
  FullState<Scalar> psi = FullState<Scalar>::Zero(a_bit * 2);
  psi[pattern] = state.coeffs(0, 0);
  psi[comp] = state.coeffs(0, 1);
  psi[a_bit + pattern] = state.coeffs(1, 0);
  psi[a_bit + comp] = state.coeffs(1, 1);
  return psi;
}

// Reads the four branch amplitudes back out (the remaining amplitudes are
// the caller's business; exact round trips only hold for family states).
template <std::floating_point Scalar>
BranchPair<Scalar> project_branch_pair(const FullState<Scalar>& psi, std::uint32_t pattern,
                                       const StarSystem& system) {
  check_oracle_dim(system.n_b);
  const std::uint32_t mask = (std::uint32_t(1) << system.n_b) - 1;
  const std::uint32_t comp = ~pattern & mask;
  const Eigen::Index a_bit = Eigen::Index(1) << system.n_b;
  BranchPair<Scalar> state;
  state.weight = static_cast<int>(std::popcount(pattern));
  state.coeffs(0, 0) = psi[pattern];
  state.coeffs(0, 1) = psi[comp];
  state.coeffs(1, 0) = psi[a_bit + pattern];
  state.coeffs(1, 1) = psi[a_bit + comp];
  return state;
}

template <std::floating_point Scalar>
FullState<Scalar> oracle_hadamard_a(const FullState<Scalar>& psi) {
  const Eigen::Index half = psi.size() / 2;
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  FullState<Scalar> out(psi.size());
  out.head(half) = (psi.head(half) + psi.tail(half)) * inv_sqrt2;
  out.tail(half) = (psi.head(half) - psi.tail(half)) * inv_sqrt2;
  return out;
}

// C-NOT with A as control and B spin k as target.
template <std::floating_point Scalar>
FullState<Scalar> oracle_cnot_a_to_b(const FullState<Scalar>& psi, int k, const StarSystem& system) {
  if (k < 0 || k >= system.n_b) throw std::invalid_argument("oracle: B index out of range");
  const Eigen::Index half = psi.size() / 2;
  const Eigen::Index target = Eigen::Index(1) << (system.n_b - 1 - k);
  FullState<Scalar> out = psi;
  for (Eigen::Index j = 0; j < half; ++j) {
    if ((j & target) == 0) std::swap(out[half + j], out[half + (j | target)]);
  }
  return out;
}

// The collective gate, realized as n_b sequential two-qubit C-NOTs.
template <std::floating_point Scalar>
FullState<Scalar> oracle_global_cnot(const FullState<Scalar>& psi, const StarSystem& system) {
  FullState<Scalar> out = psi;
  for (int k = 0; k < system.n_b; ++k) out = oracle_cnot_a_to_b(out, k, system);
  return out;
}

// Diagonal free evolution with per-spin phases; deliberately re-derived from
// bit counts rather than shared with the compressed branch_phase code path.
template <std::floating_point Scalar>
FullState<Scalar> oracle_free_evolve(const FullState<Scalar>& psi, const ExperimentConfig& cfg,
                                     const StarSystem& system) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Eigen::Index half = psi.size() / 2;
  const std::uint64_t mask = (std::uint64_t(1) << system.n_b) - 1;
  const Scalar t = static_cast<Scalar>(cfg.t_wait_s);
  const Scalar b = static_cast<Scalar>(cfg.b_off_tesla);
  FullState<Scalar> out(psi.size());
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    const int a = j >= half ? 1 : 0;
    const int w = std::popcount(static_cast<std::uint64_t>(j) & mask);
    Scalar phase = two_pi * b * Scalar(1e6) *
                   (Scalar(a) * static_cast<Scalar>(system.gamma_a) +
                    Scalar(w) * static_cast<Scalar>(system.gamma_b)) * t;
    if (cfg.include_j_during_wait) {
      phase += two_pi * static_cast<Scalar>(system.j_coupling) * t *
               (Scalar(a) - Scalar(0.5)) * (Scalar(w) - Scalar(system.n_b) / Scalar(2));
    }
    out[j] = psi[j] * std::polar(Scalar(1), phase);
  }
  return out;
}

// A-spin transverse observable 2 <|0><1|_A>, traced over the B register.
template <std::floating_point Scalar>
std::complex<Scalar> a_spin_signal(const FullState<Scalar>& psi) {
  const Eigen::Index half = psi.size() / 2;
  return Scalar(2) * psi.head(half).dot(psi.tail(half));  // dot conjugates the left factor
}

// Full protocol on an explicit B pattern, gate by gate.
template <std::floating_point Scalar = double>
std::complex<Scalar> oracle_run(std::uint32_t pattern, const ExperimentConfig& cfg,
                                const StarSystem& system) {
  cfg.validate();
  auto psi = make_ground_full<Scalar>(pattern, system);
  psi = oracle_hadamard_a(psi);
  psi = oracle_global_cnot(psi, system);
  psi = oracle_free_evolve(psi, cfg, system);
  psi = oracle_global_cnot(psi, system);
  return a_spin_signal(psi);
}

}  // namespace starsense
