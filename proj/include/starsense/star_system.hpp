#pragma once

#include <cmath>
#include <concepts>
#include <stdexcept>

namespace starsense {

// ---------------------------------------------------------------------------
// Physical constants of the 1 + N spin star.
//
// Unit conventions used throughout:
//   gyromagnetic ratios        MHz/T  (gamma/2pi, as tabulated for nuclei)
//   scalar coupling J          Hz
//   times                      s
//   field detunings            T
//   phases                     rad
// ---------------------------------------------------------------------------

struct StarSystem {
  int n_b = 9;              // peripheral B spins
  double gamma_a = 17.251;  // central A spin, MHz/T
  double gamma_b = 42.577;  // B spins, MHz/T
  double j_coupling = 10.67;  // A-B scalar coupling, Hz
  double t2_base = 0.3;     // coherence time of an unentangled line, s
  double kappa = 0.5;       // linewidth growth exponent vs lopsidedness

  StarSystem() = default;
  StarSystem(int n_b_, double gamma_a_, double gamma_b_, double j_coupling_,
             double t2_base_ = 0.3, double kappa_ = 0.5)
      : n_b(n_b_), gamma_a(gamma_a_), gamma_b(gamma_b_),
        j_coupling(j_coupling_), t2_base(t2_base_), kappa(kappa_) {
    validate();
  }

  void validate() const {
    if (n_b < 1) throw std::invalid_argument("StarSystem: n_b must be >= 1");
    if (!(gamma_a > 0) || !(gamma_b > 0))
      throw std::invalid_argument("StarSystem: gyromagnetic ratios must be positive");
    if (j_coupling < 0) throw std::invalid_argument("StarSystem: j_coupling must be >= 0");
    if (!(t2_base > 0)) throw std::invalid_argument("StarSystem: t2_base must be positive");
    if (!(kappa > 0) || kappa > 1)
      throw std::invalid_argument("StarSystem: kappa must be in (0, 1]");
  }
};

// Gyromagnetic-ratio-weighted lopsidedness of a two-branch superposition
// whose branches hold m_up and s_up B spins flipped (A differs as well).
// In units of gamma_b, so a bare B spin pair scores |m_up - s_up|.
template <std::floating_point Scalar = double>
Scalar weighted_lopsidedness(int m_up, int s_up, const StarSystem& system) {
  if (m_up < 0 || m_up > system.n_b || s_up < 0 || s_up > system.n_b)
    throw std::invalid_argument("weighted_lopsidedness: weight outside [0, n_b]");
  const Scalar ga = static_cast<Scalar>(system.gamma_a);
  const Scalar gb = static_cast<Scalar>(system.gamma_b);
  return std::abs(ga + static_cast<Scalar>(m_up - s_up) * gb) / gb;
}

// Lopsidedness of the line indexed by initial B-pattern weight m.
// The protocol pairs the weight-m branch with its complement, so the
// branch weights are (n_b - m, m).
template <std::floating_point Scalar = double>
Scalar line_lopsidedness(int m, const StarSystem& system) {
  return weighted_lopsidedness<Scalar>(system.n_b - m, m, system);
}

// Phase-sensitivity gain of the full-star NOON state over the lone A spin.
template <std::floating_point Scalar = double>
Scalar enhancement_over_a(int n_b, Scalar gamma_a, Scalar gamma_b) {
  if (n_b < 0) throw std::invalid_argument("enhancement_over_a: n_b must be >= 0");
  return (static_cast<Scalar>(n_b) * gamma_b + gamma_a) / gamma_a;
}

template <std::floating_point Scalar = double>
Scalar enhancement_over_a(const StarSystem& system) {
  return enhancement_over_a<Scalar>(system.n_b, static_cast<Scalar>(system.gamma_a),
                                    static_cast<Scalar>(system.gamma_b));
}

// Exact binomial coefficient; n <= 62 stays within unsigned 64-bit range.
inline unsigned long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned long long c = 1;
  for (int i = 0; i < k; ++i) c = c * static_cast<unsigned long long>(n - i) / (i + 1);
  return c;
}

}  // namespace starsense
