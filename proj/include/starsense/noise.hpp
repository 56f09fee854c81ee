#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <variant>

#include "starsense/branch_pair.hpp"
#include "starsense/rng.hpp"
#include "starsense/star_system.hpp"

namespace starsense {

// ---------------------------------------------------------------------------
// Dephasing channels. Phase noise is Gaussian per exposure window; a channel
// with erasure probability eps maps to sigma^2 = -2 ln(1-eps) so that the
// single-spin coherence decays by exactly 1-eps either way.
// ---------------------------------------------------------------------------

struct LocalDephasing {
  double sigma_a = 0;  // rad per exposure on the A spin
  double sigma_b = 0;  // rad per exposure on each B spin
  void validate() const {
    if (sigma_a < 0 || sigma_b < 0)
      throw std::invalid_argument("LocalDephasing: sigmas must be >= 0");
  }
};

struct GlobalDephasing {
  double sigma_global = 0;  // rad per exposure per unit lopsidedness
  void validate() const {
    if (sigma_global < 0)
      throw std::invalid_argument("GlobalDephasing: sigma must be >= 0");
  }
};

struct PhotonLoss {
  double epsilon = 0;  // per-photon loss probability
  void validate() const {
    if (epsilon < 0 || epsilon >= 1)
      throw std::invalid_argument("PhotonLoss: epsilon must be in [0, 1)");
  }
};

using NoiseModel = std::variant<LocalDephasing, GlobalDephasing, PhotonLoss>;

inline void validate_noise(const NoiseModel& model) {
  std::visit([](const auto& m) { m.validate(); }, model);
}

template <std::floating_point Scalar = double>
Scalar epsilon_to_sigma(Scalar epsilon) {
  if (epsilon < 0 || epsilon >= 1)
    throw std::invalid_argument("epsilon_to_sigma: epsilon must be in [0, 1)");
  return std::sqrt(Scalar(-2) * std::log1p(-epsilon));
}

// Independent Gaussian phases on each of the n_b + 1 spins; every spin
// differs between the branches of a family state, so the variances add.
template <std::floating_point Scalar = double>
Scalar local_dephasing_factor(Scalar sigma_a, Scalar sigma_b, const StarSystem& system) {
  if (sigma_a < 0 || sigma_b < 0)
    throw std::invalid_argument("local_dephasing_factor: sigmas must be >= 0");
  return std::exp(-(sigma_a * sigma_a + Scalar(system.n_b) * sigma_b * sigma_b) / 2);
}

// A shared random field couples through the weighted lopsidedness.
template <std::floating_point Scalar = double>
Scalar global_dephasing_factor(Scalar lopsidedness, Scalar sigma_global) {
  if (lopsidedness < 0 || sigma_global < 0)
    throw std::invalid_argument("global_dephasing_factor: inputs must be >= 0");
  const Scalar x = lopsidedness * sigma_global;
  return std::exp(-x * x / 2);
}

// Scales each component's coherence_factor by the channel's attenuation.
template <std::floating_point Scalar>
SpinEnsemble<Scalar> apply_noise(const SpinEnsemble<Scalar>& ensemble, const NoiseModel& model) {
  validate_noise(model);
  SpinEnsemble<Scalar> out = ensemble;
  for (auto& comp : out.components) {
    const Scalar factor = std::visit(
        [&](const auto& m) -> Scalar {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, LocalDephasing>) {
            return local_dephasing_factor<Scalar>(static_cast<Scalar>(m.sigma_a),
                                                  static_cast<Scalar>(m.sigma_b), out.system);
          } else if constexpr (std::is_same_v<T, GlobalDephasing>) {
            return global_dephasing_factor<Scalar>(
                line_lopsidedness<Scalar>(comp.weight, out.system),
                static_cast<Scalar>(m.sigma_global));
          } else {
            throw std::invalid_argument("apply_noise: photon loss does not act on spin ensembles");
          }
        },
        model);
    comp.coherence_factor *= factor;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling oracle for the analytic factors.
// ---------------------------------------------------------------------------

template <std::floating_point Scalar = double>
struct DephaseStats {
  std::complex<Scalar> mean_coherence{0, 0};
  Scalar attenuation = 0;   // Re(mean), the unbiased estimator of the factor
  Scalar std_error = 0;     // standard error of the attenuation
  Scalar phase_spread = 0;  // sample std of the branch phase difference
  long long trials = 0;
};

// Draws per-spin Gaussian phases per trial and averages exp(i dphi) over the
// branch phase difference. Trial t uses substream (seed, t), so the result
// is independent of evaluation order.
template <std::floating_point Scalar>
DephaseStats<Scalar> monte_carlo_dephase(const BranchPair<Scalar>& state, Scalar sigma_a,
                                         Scalar sigma_b, const StarSystem& system,
                                         std::uint64_t seed, long long trials) {
  if (trials < 1) throw std::invalid_argument("monte_carlo_dephase: trials must be >= 1");
  if (sigma_a < 0 || sigma_b < 0)
    throw std::invalid_argument("monte_carlo_dephase: sigmas must be >= 0");
  (void)state;  // family states dephase identically: all n_b + 1 spins differ

  long double sum_cos = 0, sum_cos2 = 0, sum_sin = 0;
  long double sum_phi = 0, sum_phi2 = 0;
  for (long long t = 0; t < trials; ++t) {
    GaussianSampler draw(seed, static_cast<std::uint64_t>(t));
    Scalar dphi = sigma_a * static_cast<Scalar>(draw());
    for (int k = 0; k < system.n_b; ++k) dphi += sigma_b * static_cast<Scalar>(draw());
    const Scalar c = std::cos(dphi);
    sum_cos += c;
    sum_cos2 += static_cast<long double>(c) * c;
    sum_sin += std::sin(dphi);
    sum_phi += dphi;
    sum_phi2 += static_cast<long double>(dphi) * dphi;
  }

  DephaseStats<Scalar> stats;
  stats.trials = trials;
  const long double n = static_cast<long double>(trials);
  stats.mean_coherence = std::complex<Scalar>(static_cast<Scalar>(sum_cos / n),
                                              static_cast<Scalar>(sum_sin / n));
  stats.attenuation = static_cast<Scalar>(sum_cos / n);
  const long double var_cos = std::max(0.0L, sum_cos2 / n - (sum_cos / n) * (sum_cos / n));
  stats.std_error = static_cast<Scalar>(std::sqrt(var_cos / n));
  const long double var_phi = std::max(0.0L, sum_phi2 / n - (sum_phi / n) * (sum_phi / n));
  stats.phase_spread = static_cast<Scalar>(std::sqrt(var_phi));
  return stats;
}

// ---------------------------------------------------------------------------
// Noise-model bookkeeping for the sensitivity comparison.
// ---------------------------------------------------------------------------

// Size of the canonical cat state that decoheres at the same rate: local
// noise sees every participating spin, a global field sees only the
// branch-weight imbalance.
template <std::floating_point Scalar = double>
Scalar effective_cat_size(int m_up, int s_up, const StarSystem& system, const NoiseModel& model) {
  if (m_up < 0 || m_up > system.n_b || s_up < 0 || s_up > system.n_b)
    throw std::invalid_argument("effective_cat_size: weight outside [0, n_b]");
  return std::visit(
      [&](const auto& m) -> Scalar {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LocalDephasing>) {
          return Scalar(system.n_b + 1);
        } else if constexpr (std::is_same_v<T, GlobalDephasing>) {
          return Scalar(std::abs(m_up - s_up));
        } else {
          throw std::invalid_argument("effective_cat_size: photon loss does not classify spin states");
        }
      },
      model);
}

// Probability that all n photons survive a lossy channel.
template <std::floating_point Scalar = double>
Scalar photon_survival(int n, Scalar epsilon) {
  if (n < 1) throw std::invalid_argument("photon_survival: n must be >= 1");
  if (epsilon < 0 || epsilon >= 1)
    throw std::invalid_argument("photon_survival: epsilon must be in [0, 1)");
  return std::pow(Scalar(1) - epsilon, Scalar(n));
}

}  // namespace starsense
