#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "starsense/noise.hpp"
#include "starsense/rng.hpp"
#include "starsense/star_system.hpp"

namespace starsense {

// ---------------------------------------------------------------------------
// Shot-budget variance calculus for an n-particle probe: per-shot phase
// readout noise of 1 rad^2 (quantum projection) plus per-particle phase-rate
// noise var_h, M shots of exposure t_e inside a total budget t_tot.
// ---------------------------------------------------------------------------

struct MetrologyConfig {
  int n = 1;             // particle count of the probe state
  double t_tot_s = 1;    // total sensing budget
  double t_e_s = 1e-3;   // exposure per shot
  double t_g_s = 0;      // gating/readout overhead per shot
  double var_h = 0;      // per-particle phase-rate variance, rad^2/s^2
  double readout_phase_std_rad = 1;  // per-shot phase readout noise (0 disables)

  long long m_shots() const {
    const double x = t_tot_s / (t_e_s + t_g_s);
    return static_cast<long long>(std::floor(x * (1 + 1e-12) + 1e-12));
  }

  void validate() const {
    if (n < 1) throw std::invalid_argument("MetrologyConfig: n must be >= 1");
    if (!(t_e_s > 0)) throw std::invalid_argument("MetrologyConfig: t_e_s must be > 0");
    if (t_g_s < 0) throw std::invalid_argument("MetrologyConfig: t_g_s must be >= 0");
    if (t_tot_s + 1e-12 * t_tot_s < t_e_s + t_g_s)
      throw std::invalid_argument("MetrologyConfig: t_tot_s must cover at least one shot");
    if (var_h < 0) throw std::invalid_argument("MetrologyConfig: var_h must be >= 0");
    if (readout_phase_std_rad < 0)
      throw std::invalid_argument("MetrologyConfig: readout noise must be >= 0");
  }
};

template <std::floating_point Scalar = double>
Scalar phase_rate_variance(int n, Scalar t) {
  if (n < 1) throw std::invalid_argument("phase_rate_variance: n must be >= 1");
  if (!(t > 0)) throw std::invalid_argument("phase_rate_variance: t must be > 0");
  return Scalar(1) / (Scalar(n) * Scalar(n) * t * t);
}

template <std::floating_point Scalar = double>
struct FieldVariance {
  Scalar exact = 0;        // (1/M) (1/(n t_e)^2 + var_h/n)
  Scalar approximate = 0;  // (1/t_tot) (1/(n^2 t_e) + t_e var_h/n)
};

// Variance of the mean phase-rate estimate over the shot budget, in both the
// exact per-shot form and the t_g-free continuum approximation.
template <std::floating_point Scalar = double>
FieldVariance<Scalar> field_variance(const MetrologyConfig& cfg) {
  cfg.validate();
  const auto m = cfg.m_shots();
  if (m < 1) throw std::invalid_argument("field_variance: budget below one shot");
  const Scalar n = Scalar(cfg.n);
  const Scalar te = static_cast<Scalar>(cfg.t_e_s);
  const Scalar vh = static_cast<Scalar>(cfg.var_h);
  FieldVariance<Scalar> out;
  out.exact = (Scalar(1) / Scalar(m)) * (Scalar(1) / (n * n * te * te) + vh / n);
  out.approximate = (Scalar(1) / static_cast<Scalar>(cfg.t_tot_s)) *
                    (Scalar(1) / (n * n * te) + te * vh / n);
  return out;
}

// Stationary point of the approximate variance in t_e.
template <std::floating_point Scalar = double>
Scalar optimal_exposure(int n, Scalar var_h) {
  if (n < 1) throw std::invalid_argument("optimal_exposure: n must be >= 1");
  if (!(var_h > 0))
    throw std::invalid_argument("optimal_exposure: var_h must be > 0 (no finite optimum)");
  return Scalar(1) / std::sqrt(Scalar(n) * var_h);
}

// Phase-rate std at the optimal exposure: sqrt(2 sqrt(var_h) / (t_tot n^1.5)).
template <std::floating_point Scalar = double>
Scalar optimal_field_std(int n, Scalar var_h, Scalar t_tot) {
  if (n < 1) throw std::invalid_argument("optimal_field_std: n must be >= 1");
  if (!(var_h > 0)) throw std::invalid_argument("optimal_field_std: var_h must be > 0");
  if (!(t_tot > 0)) throw std::invalid_argument("optimal_field_std: t_tot must be > 0");
  return std::sqrt(Scalar(2) * std::sqrt(var_h) / (t_tot * std::pow(Scalar(n), Scalar(1.5))));
}

// ---------------------------------------------------------------------------
// Lossy photonic comparison: a shot carries Heisenberg-limited information
// only if all n photons survive.
// ---------------------------------------------------------------------------

template <std::floating_point Scalar = double>
Scalar optical_phase_std(int n, Scalar epsilon, long long m_shots) {
  if (n < 1) throw std::invalid_argument("optical_phase_std: n must be >= 1");
  if (m_shots < 1) throw std::invalid_argument("optical_phase_std: m_shots must be >= 1");
  const Scalar survival = photon_survival(n, epsilon);
  return Scalar(1) / (Scalar(n) * std::sqrt(Scalar(m_shots) * survival));
}

// Integer n maximizing n^2 (1-eps)^n; the continuous stationary point is
// -2/ln(1-eps).
inline int optimal_photonic_size(double epsilon) {
  if (!(epsilon > 0) || !(epsilon < 1))
    throw std::invalid_argument("optimal_photonic_size: epsilon must be in (0, 1)");
  const double n_cont = -2.0 / std::log1p(-epsilon);
  const int lo = std::max(1, static_cast<int>(std::floor(n_cont)));
  const int hi = lo + 1;
  auto log_objective = [&](int n) { return 2 * std::log(double(n)) + n * std::log1p(-epsilon); };
  return log_objective(lo) >= log_objective(hi) ? lo : hi;
}

// ---------------------------------------------------------------------------
// Sensitivity curves, per particle: std multiplied by sqrt(n) so the
// standard quantum limit is flat and the Heisenberg limit falls as n^-1/2.
// ---------------------------------------------------------------------------

// How a per-exposure disturbance probability maps onto the per-particle
// phase-rate variance feeding the spin curves: "gaussian" uses the
// sigma^2 = -2 ln(1-eps) phase channel; "erasure" randomizes the phase
// completely (variance pi^2/3) with probability eps.
enum class EpsilonMapping { gaussian, erasure };

inline const char* epsilon_mapping_name(EpsilonMapping mapping) {
  return mapping == EpsilonMapping::gaussian ? "gaussian" : "erasure";
}

template <std::floating_point Scalar = double>
Scalar epsilon_to_rate_variance(Scalar epsilon, Scalar t_e_ref, EpsilonMapping mapping) {
  if (!(t_e_ref > 0)) throw std::invalid_argument("epsilon_to_rate_variance: t_e_ref must be > 0");
  if (mapping == EpsilonMapping::gaussian) {
    const Scalar sigma = epsilon_to_sigma(epsilon);
    return sigma * sigma / (t_e_ref * t_e_ref);
  }
  if (epsilon < 0 || epsilon >= 1)
    throw std::invalid_argument("epsilon_to_rate_variance: epsilon must be in [0, 1)");
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  return (pi * pi / 3) * epsilon / (t_e_ref * t_e_ref);
}

struct SensitivityPoint {
  int n = 1;
  double raw_std = 0;         // phase std per budget, rad
  double normalized_std = 0;  // raw_std * sqrt(n)
  double optimal_te_s = 0;    // exposure used (spin family; 0 elsewhere)
};

struct SensitivityCurve {
  std::string family;  // "spin" | "optical" | "sql" | "heisenberg"
  double epsilon = 0;
  std::vector<SensitivityPoint> points;
};

struct Figure3Result {
  std::vector<SensitivityCurve> curves;
  long long m_shots = 0;
  double t_e_ref_s = 0;
  EpsilonMapping mapping = EpsilonMapping::gaussian;
  static constexpr const char* normalization = "std_times_sqrt_n";
};

// Spin curves: per-particle dephasing at rate-variance var_h(eps), exposure
// capped at t_e_ref and otherwise optimized per n, budget m_shots * t_e_ref.
// Phase std is the rate std scaled back by t_e_ref so the eps = 0 limit lands
// exactly on the Heisenberg reference. Optical curves from optical_phase_std.
inline Figure3Result figure3_curves(const std::vector<double>& epsilons, int n_max,
                                    long long m_shots, double t_e_ref = 1e-3,
                                    EpsilonMapping mapping = EpsilonMapping::gaussian) {
  if (n_max < 2) throw std::invalid_argument("figure3_curves: n_max must be >= 2");
  if (m_shots < 1) throw std::invalid_argument("figure3_curves: m_shots must be >= 1");
  if (epsilons.empty()) throw std::invalid_argument("figure3_curves: epsilon list empty");
  if (!(t_e_ref > 0)) throw std::invalid_argument("figure3_curves: t_e_ref must be > 0");

  Figure3Result result;
  result.m_shots = m_shots;
  result.t_e_ref_s = t_e_ref;
  result.mapping = mapping;
  const double t_tot = static_cast<double>(m_shots) * t_e_ref;
  const double sqrt_m = std::sqrt(static_cast<double>(m_shots));

  SensitivityCurve sql{"sql", 0, {}};
  SensitivityCurve heisenberg{"heisenberg", 0, {}};
  for (int n = 1; n <= n_max; ++n) {
    const double h = 1.0 / (double(n) * sqrt_m);
    const double s = 1.0 / (std::sqrt(double(n)) * sqrt_m);
    sql.points.push_back({n, s, s * std::sqrt(double(n)), 0});
    heisenberg.points.push_back({n, h, h * std::sqrt(double(n)), 0});
  }
  result.curves.push_back(std::move(sql));
  result.curves.push_back(std::move(heisenberg));

  for (const double eps : epsilons) {
    const double var_h = epsilon_to_rate_variance(eps, t_e_ref, mapping);

    SensitivityCurve spin{"spin", eps, {}};
    for (int n = 1; n <= n_max; ++n) {
      const double te = var_h > 0 ? std::min(t_e_ref, optimal_exposure(n, var_h)) : t_e_ref;
      MetrologyConfig cfg;
      cfg.n = n;
      cfg.t_tot_s = t_tot;
      cfg.t_e_s = te;
      cfg.var_h = var_h;
      const double raw = std::sqrt(field_variance(cfg).approximate) * t_e_ref;
      spin.points.push_back({n, raw, raw * std::sqrt(double(n)), te});
    }
    result.curves.push_back(std::move(spin));

    SensitivityCurve optical{"optical", eps, {}};
    for (int n = 1; n <= n_max; ++n) {
      const double raw = optical_phase_std(n, eps, m_shots);
      optical.points.push_back({n, raw, raw * std::sqrt(double(n)), 0});
    }
    result.curves.push_back(std::move(optical));
  }
  return result;
}

// ---------------------------------------------------------------------------
// End-to-end sampled estimator, validating the variance calculus.
// ---------------------------------------------------------------------------

template <std::floating_point Scalar = double>
struct EstimateResult {
  Scalar mean_b_tesla = 0;
  Scalar sample_variance = 0;  // unbiased, Tesla^2
  std::vector<Scalar> shots;   // per-shot estimates, Tesla
};

// Simulates m_shots protocol runs on the m = 0 line: each shot measures
// phase = lever * b_true * t_e plus sampled readout and dephasing noise and
// inverts the lever. Shot k draws from substream (seed, k). The sample
// variance reproduces the exact field_variance when cfg.n matches the
// probe's effective particle number (homonuclear: n_b + 1).
template <std::floating_point Scalar = double>
EstimateResult<Scalar> monte_carlo_estimate(const StarSystem& system, const NoiseModel& noise,
                                            Scalar b_true_tesla, const MetrologyConfig& cfg,
                                            std::uint64_t seed) {
  cfg.validate();
  validate_noise(noise);
  const auto m = cfg.m_shots();
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar ell = line_lopsidedness<Scalar>(0, system);
  const Scalar lever = ell * two_pi * static_cast<Scalar>(system.gamma_b) * Scalar(1e6);  // rad/s/T
  const Scalar te = static_cast<Scalar>(cfg.t_e_s);
  const Scalar phase_per_shot = lever * b_true_tesla * te;
  if (!(std::abs(phase_per_shot) < std::numbers::pi_v<Scalar> / 2))
    throw std::invalid_argument(
        "monte_carlo_estimate: single-shot phase exceeds pi/2 (phase wrap ambiguity)");

  EstimateResult<Scalar> result;
  result.shots.reserve(static_cast<std::size_t>(m));
  long double sum = 0;
  for (long long k = 0; k < m; ++k) {
    GaussianSampler draw(seed, static_cast<std::uint64_t>(k));
    Scalar phi = phase_per_shot;
    if (cfg.readout_phase_std_rad > 0)
      phi += static_cast<Scalar>(cfg.readout_phase_std_rad) * static_cast<Scalar>(draw());
    std::visit(
        [&](const auto& mod) {
          using T = std::decay_t<decltype(mod)>;
          if constexpr (std::is_same_v<T, LocalDephasing>) {
            phi += static_cast<Scalar>(mod.sigma_a) * static_cast<Scalar>(draw());
            for (int s = 0; s < system.n_b; ++s)
              phi += static_cast<Scalar>(mod.sigma_b) * static_cast<Scalar>(draw());
          } else if constexpr (std::is_same_v<T, GlobalDephasing>) {
            phi += ell * static_cast<Scalar>(mod.sigma_global) * static_cast<Scalar>(draw());
          } else {
            throw std::invalid_argument("monte_carlo_estimate: photon loss is not a spin channel");
          }
        },
        noise);
    const Scalar b_hat = phi / (lever * te);
    result.shots.push_back(b_hat);
    sum += b_hat;
  }
  result.mean_b_tesla = static_cast<Scalar>(sum / static_cast<long double>(m));
  long double ss = 0;
  for (const Scalar b_hat : result.shots) {
    const long double d = static_cast<long double>(b_hat) - result.mean_b_tesla;
    ss += d * d;
  }
  result.sample_variance = m > 1 ? static_cast<Scalar>(ss / static_cast<long double>(m - 1)) : Scalar(0);
  return result;
}

}  // namespace starsense
