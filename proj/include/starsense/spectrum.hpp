#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "starsense/gates.hpp"
#include "starsense/star_system.hpp"

namespace starsense {

// ---------------------------------------------------------------------------
// A-spin multiplet synthesis and T_wait-sweep Fourier analysis.
//
// Frequency sign convention: positive offsets sit to the left of the
// spectrum, so line m = 0 (all B spins down in the reference pattern) is the
// leftmost line at +n_b/2 * J.
// ---------------------------------------------------------------------------

template <std::floating_point Scalar = double>
struct SpectralLine {
  int weight = 0;
  Scalar frequency_hz = 0;  // offset from the A carrier
  Scalar intensity = 0;     // relative, sums to 1 across the multiplet
  Scalar linewidth_hz = 0;  // full width at half maximum (absorption)
};

// FWHM growth with lopsidedness: base width 1/(pi t2_base) at ell <= 1,
// sub-linear power law above it.
template <std::floating_point Scalar = double>
Scalar linewidth_model(Scalar lopsidedness, const StarSystem& system) {
  if (!(lopsidedness >= 0))
    throw std::invalid_argument("linewidth_model: lopsidedness must be >= 0");
  const Scalar base = Scalar(1) / (std::numbers::pi_v<Scalar> * static_cast<Scalar>(system.t2_base));
  return base * std::pow(std::max(lopsidedness, Scalar(1)), static_cast<Scalar>(system.kappa));
}

// Coherence time implied by the width model; used for matched apodization.
template <std::floating_point Scalar = double>
Scalar line_decay_time(Scalar lopsidedness, const StarSystem& system) {
  return Scalar(1) / (std::numbers::pi_v<Scalar> * linewidth_model(lopsidedness, system));
}

template <std::floating_point Scalar = double>
std::vector<SpectralLine<Scalar>> line_table(const StarSystem& system) {
  system.validate();
  std::vector<SpectralLine<Scalar>> lines;
  lines.reserve(system.n_b + 1);
  const Scalar total = std::ldexp(Scalar(1), system.n_b);
  for (int m = 0; m <= system.n_b; ++m) {
    SpectralLine<Scalar> line;
    line.weight = m;
    line.frequency_hz = (Scalar(system.n_b) / 2 - Scalar(m)) * static_cast<Scalar>(system.j_coupling);
    line.intensity = static_cast<Scalar>(binomial(system.n_b, m)) / total;
    line.linewidth_hz = linewidth_model(line_lopsidedness<Scalar>(m, system), system);
    lines.push_back(line);
  }
  return lines;
}

template <std::floating_point Scalar = double>
struct SpectrumTrace {
  Eigen::Vector<Scalar, Eigen::Dynamic> frequency_hz;
  Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic> amplitude;
};

template <std::floating_point Scalar = double>
Eigen::Vector<Scalar, Eigen::Dynamic> make_frequency_grid(Scalar f_min, Scalar f_max, Scalar df) {
  if (!(df > 0) || !(f_max > f_min))
    throw std::invalid_argument("make_frequency_grid: need f_max > f_min and df > 0");
  const auto n = static_cast<Eigen::Index>(std::floor((f_max - f_min) / df)) + 1;
  Eigen::Vector<Scalar, Eigen::Dynamic> grid(n);
  for (Eigen::Index i = 0; i < n; ++i) grid[i] = f_min + Scalar(i) * df;
  return grid;
}

// Sum of complex Lorentzians hw/(hw + i(f - f0)), unit height at center, so
// peak heights go as intensity * amplitude and the real part is the usual
// absorption shape with FWHM = linewidth.
template <std::floating_point Scalar, typename Derived>
SpectrumTrace<Scalar> synthesize_spectrum(const std::vector<SpectralLine<Scalar>>& lines,
                                          const std::vector<std::complex<Scalar>>& per_line_amplitude,
                                          const Eigen::DenseBase<Derived>& grid) {
  if (lines.size() != per_line_amplitude.size())
    throw std::invalid_argument("synthesize_spectrum: one amplitude per line required");
  if (lines.empty()) throw std::invalid_argument("synthesize_spectrum: no lines");
  const auto f = grid.derived().eval();
  if (f.size() < 2) throw std::invalid_argument("synthesize_spectrum: grid too small");
  const Scalar df = f[1] - f[0];
  if (!(df > 0)) throw std::invalid_argument("synthesize_spectrum: grid must increase");
  for (Eigen::Index i = 1; i < f.size(); ++i) {
    if (std::abs((f[i] - f[i - 1]) - df) > Scalar(1e-9) * df)
      throw std::invalid_argument("synthesize_spectrum: non-uniform grid");
  }
  Scalar narrowest = lines.front().linewidth_hz;
  for (const auto& line : lines) narrowest = std::min(narrowest, line.linewidth_hz);
  if (narrowest < 4 * df)
    throw std::invalid_argument("synthesize_spectrum: grid too coarse (< 4 samples per linewidth)");

  SpectrumTrace<Scalar> trace;
  trace.frequency_hz = f.template cast<Scalar>();
  trace.amplitude.setZero(f.size());
  using Complex = std::complex<Scalar>;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const Scalar hw = lines[k].linewidth_hz / 2;
    const Complex height = lines[k].intensity * per_line_amplitude[k];
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      trace.amplitude[i] += height * (hw / Complex(hw, f[i] - lines[k].frequency_hz));
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Sweep analysis: matched exponential apodization, 4x zero-padded FFT,
// quadratic peak interpolation, width from half-maximum crossings.
// ---------------------------------------------------------------------------

template <std::floating_point Scalar = double>
struct OscillationPeak {
  int weight = 0;
  Scalar lopsidedness = 0;
  Scalar freq_hz = 0;   // magnitude of the oscillation frequency
  Scalar width_hz = 0;  // FWHM of the apodized peak
};

namespace detail {

// Signed frequency of (possibly fractional) bin q on an M-point grid.
template <std::floating_point Scalar>
Scalar signed_bin_freq(Scalar q, Eigen::Index m_bins, Scalar fs) {
  if (q > Scalar(m_bins) / 2) q -= Scalar(m_bins);
  return q * fs / Scalar(m_bins);
}

}  // namespace detail

template <std::floating_point Scalar>
std::vector<OscillationPeak<Scalar>> fft_oscillation(const SweepResult<Scalar>& sweep,
                                                     const StarSystem& system) {
  const Eigen::Index n_t = sweep.times.size();
  if (n_t < 4) throw std::invalid_argument("fft_oscillation: sweep too short");
  const Scalar dt = sweep.times[1] - sweep.times[0];
  for (Eigen::Index i = 1; i < n_t; ++i) {
    if (std::abs((sweep.times[i] - sweep.times[i - 1]) - dt) > Scalar(1e-9) * dt)
      throw std::invalid_argument("fft_oscillation: non-uniform time grid");
  }
  const Scalar fs = Scalar(1) / dt;
  const Eigen::Index m_bins = 4 * n_t;  // zero-padded length

  Eigen::FFT<Scalar> fft;
  std::vector<OscillationPeak<Scalar>> peaks;
  peaks.reserve(sweep.lines.size());

  for (std::size_t li = 0; li < sweep.lines.size(); ++li) {
    const Scalar tau = line_decay_time(sweep.lines[li].lopsidedness, system);
    std::vector<std::complex<Scalar>> fid(static_cast<std::size_t>(m_bins),
                                          std::complex<Scalar>(0));
    for (Eigen::Index j = 0; j < n_t; ++j) {
      const Scalar window = std::exp(-(sweep.times[j] - sweep.times[0]) / tau);
      fid[static_cast<std::size_t>(j)] = sweep.signals(static_cast<Eigen::Index>(li), j) * window;
    }
    std::vector<std::complex<Scalar>> spec;
    fft.fwd(spec, fid);

    Eigen::Index k_peak = 0;
    Scalar best = std::abs(spec[0]);
    for (Eigen::Index k = 1; k < m_bins; ++k) {
      const Scalar mag = std::abs(spec[static_cast<std::size_t>(k)]);
      if (mag > best) {
        best = mag;
        k_peak = k;
      }
    }

    auto mag_at = [&](Eigen::Index k) {
      const Eigen::Index kk = ((k % m_bins) + m_bins) % m_bins;
      return std::abs(spec[static_cast<std::size_t>(kk)]);
    };

    // Three-point parabola around the maximum bin.
    const Scalar alpha = mag_at(k_peak - 1);
    const Scalar beta = mag_at(k_peak);
    const Scalar gamma = mag_at(k_peak + 1);
    const Scalar denom = alpha - 2 * beta + gamma;
    const Scalar delta = std::abs(denom) > 0 ? Scalar(0.5) * (alpha - gamma) / denom : Scalar(0);
    const Scalar f_signed = detail::signed_bin_freq(Scalar(k_peak) + delta, m_bins, fs);

    // A peak within one un-padded bin of the Nyquist edge is indistinguishable
    // from an aliased faster oscillation.
    if (std::abs(f_signed) >= fs / 2 - fs / Scalar(n_t))
      throw std::runtime_error("fft_oscillation: aliasing detected on line m=" +
                               std::to_string(sweep.lines[li].weight));

    // Full width at half maximum by linear interpolation of the crossings.
    const Scalar half = beta / 2;
    Eigen::Index right = k_peak;
    while (right - k_peak < m_bins / 2 && mag_at(right + 1) >= half) ++right;
    Eigen::Index left = k_peak;
    while (k_peak - left < m_bins / 2 && mag_at(left - 1) >= half) --left;
    Scalar frac_r = 0, frac_l = 0;
    if (right - k_peak < m_bins / 2) {
      const Scalar drop = mag_at(right) - mag_at(right + 1);
      frac_r = drop > 0 ? (mag_at(right) - half) / drop : Scalar(0);
    }
    if (k_peak - left < m_bins / 2) {
      const Scalar drop = mag_at(left) - mag_at(left - 1);
      frac_l = drop > 0 ? (mag_at(left) - half) / drop : Scalar(0);
    }
    const Scalar width_bins = Scalar(right - left) + frac_r + frac_l;

    OscillationPeak<Scalar> peak;
    peak.weight = sweep.lines[li].weight;
    peak.lopsidedness = sweep.lines[li].lopsidedness;
    peak.freq_hz = std::abs(f_signed);
    peak.width_hz = width_bins * fs / Scalar(m_bins);
    peaks.push_back(peak);
  }
  return peaks;
}

template <std::floating_point Scalar = double>
struct DetuningEstimate {
  Scalar b_off_tesla = 0;
  Scalar sigma_tesla = 0;
};

// Inverts f = ell_gamma * gamma_b * b_off. The uncertainty maps the peak
// width through the same lever arm, divided by the peak signal-to-noise
// (noiseless synthetic sweeps use snr = 1, i.e. width-limited).
template <std::floating_point Scalar = double>
DetuningEstimate<Scalar> estimate_detuning(Scalar peak_freq_hz, Scalar peak_width_hz,
                                           Scalar lopsidedness, const StarSystem& system,
                                           Scalar snr = Scalar(1)) {
  if (!(lopsidedness > 0))
    throw std::invalid_argument("estimate_detuning: lopsidedness must be > 0");
  if (!(snr > 0)) throw std::invalid_argument("estimate_detuning: snr must be > 0");
  const Scalar lever = lopsidedness * static_cast<Scalar>(system.gamma_b) * Scalar(1e6);  // Hz/T
  DetuningEstimate<Scalar> est;
  est.b_off_tesla = peak_freq_hz / lever;
  est.sigma_tesla = peak_width_hz / lever / snr;
  return est;
}

}  // namespace starsense
