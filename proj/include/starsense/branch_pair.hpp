#pragma once

#include <Eigen/Dense>
#include <complex>
#include <concepts>
#include <stdexcept>
#include <vector>

#include "starsense/star_system.hpp"

namespace starsense {

// ---------------------------------------------------------------------------
// Compressed two-branch representation.
//
// Every state reachable by the protocol from a single B pattern lives in the
// span of four basis states: A in {|0>,|1>} times {reference pattern, its
// bitwise complement}. A 2x2 coefficient matrix over (A state) x (pattern)
// is therefore closed under the whole gate set, independent of n_b.
// ---------------------------------------------------------------------------

enum class Pattern : int { ref = 0, comp = 1 };

template <std::floating_point Scalar = double>
struct BranchPair {
  using Complex = std::complex<Scalar>;
  using CoeffMatrix = Eigen::Matrix<Complex, 2, 2>;

  int weight = 0;  // Hamming weight of the reference B pattern
  // rows: A spin state a in {0,1}; cols: {ref, comp}
  CoeffMatrix coeffs = CoeffMatrix::Zero();

  // |0>_A (x) |reference pattern>
  static BranchPair ground(int weight_) {
    BranchPair s;
    s.weight = weight_;
    s.coeffs(0, 0) = Complex(1);
    return s;
  }

  Complex& c(int a, Pattern b) { return coeffs(a, static_cast<int>(b)); }
  const Complex& c(int a, Pattern b) const { return coeffs(a, static_cast<int>(b)); }

  Scalar squared_norm() const { return coeffs.squaredNorm(); }

  BranchPair normalized() const {
    BranchPair s = *this;
    s.coeffs /= std::sqrt(squared_norm());
    return s;
  }
};

using BranchPaird = BranchPair<double>;

// ---------------------------------------------------------------------------
// Thermal B bath, modeled at infinite temperature: one representative
// pattern per Hamming weight, weighted by its binomial multiplicity.
// ---------------------------------------------------------------------------

template <std::floating_point Scalar = double>
struct EnsembleComponent {
  int weight = 0;
  unsigned long long multiplicity = 1;  // C(n_b, weight)
  Scalar probability = 0;
  BranchPair<Scalar> state;
  Scalar coherence_factor = 1;  // accumulated dephasing attenuation
};

template <std::floating_point Scalar = double>
struct SpinEnsemble {
  StarSystem system;
  std::vector<EnsembleComponent<Scalar>> components;
};

using SpinEnsembled = SpinEnsemble<double>;

// A spin pseudo-pure in |0>, B sectors m = 0..n_b with binomial weights.
// b_up_probability = 0.5 is the infinite-temperature bath; other values give
// the polarized (Boltzmann-at-field) sector distribution.
template <std::floating_point Scalar = double>
SpinEnsemble<Scalar> build_thermal_ensemble(const StarSystem& system,
                                            Scalar b_up_probability = Scalar(0.5)) {
  system.validate();
  if (!(b_up_probability >= 0 && b_up_probability <= 1))
    throw std::invalid_argument("build_thermal_ensemble: b_up_probability outside [0, 1]");
  SpinEnsemble<Scalar> ensemble;
  ensemble.system = system;
  const Scalar p = b_up_probability;
  ensemble.components.reserve(system.n_b + 1);
  for (int m = 0; m <= system.n_b; ++m) {
    EnsembleComponent<Scalar> comp;
    comp.weight = m;
    comp.multiplicity = binomial(system.n_b, m);
    comp.probability = static_cast<Scalar>(comp.multiplicity) * std::pow(p, Scalar(m)) *
                       std::pow(Scalar(1) - p, Scalar(system.n_b - m));
    comp.state = BranchPair<Scalar>::ground(m);
    comp.coherence_factor = 1;
    ensemble.components.push_back(comp);
  }
  return ensemble;
}

}  // namespace starsense
