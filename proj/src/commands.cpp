#include "starsense/io/commands.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <numeric>
#include <string>
#include <system_error>
#include <vector>

#include "starsense/gates.hpp"
#include "starsense/io/emit.hpp"
#include "starsense/metrology.hpp"
#include "starsense/noise.hpp"
#include "starsense/oracle.hpp"
#include "starsense/rng.hpp"
#include "starsense/spectrum.hpp"

namespace starsense {

namespace {

std::string out_path(const RunConfig& cfg, const char* name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

// Lowest-bits representative of a weight class.
std::uint32_t pattern_of_weight(int m) { return (std::uint32_t(1) << m) - 1; }

// Uniformly random B pattern with m bits set.
std::uint32_t random_pattern_of_weight(int m, int n_b, SplitMix64& rng) {
  std::vector<int> slots(n_b);
  std::iota(slots.begin(), slots.end(), 0);
  std::uint32_t pattern = 0;
  for (int i = 0; i < m; ++i) {
    const auto j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(n_b - i));
    std::swap(slots[i], slots[j]);
    pattern |= std::uint32_t(1) << slots[i];
  }
  return pattern;
}

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

const std::vector<MetadataTag> kSignTags = {
    {"sign_convention", "positive b_off advances the |1> branch phase"},
    {"frequency_convention", "line m=0 leftmost at +n_b/2*J"},
};

}  // namespace

// ---------------------------------------------------------------------------
// spectrum: initial multiplet (red) and post-protocol multiplet (blue).
// ---------------------------------------------------------------------------

int cmd_spectrum(const RunConfig& cfg, const CommandOptions& opts) {
  validate_run_config(cfg);
  const StarSystem& system = cfg.system;
  auto ensemble = build_thermal_ensemble<double>(system, cfg.b_polarization);
  ensemble = apply_noise(ensemble, make_noise_model(cfg));

  const auto lines = line_table<double>(system);
  const auto signals = run_noon_protocol(ensemble, cfg.experiment);

  if (opts.oracle) {
    for (std::size_t i = 0; i < signals.size(); ++i) {
      const auto expected = oracle_run<double>(pattern_of_weight(signals[i].weight),
                                               cfg.experiment, system) *
                            ensemble.components[i].coherence_factor;
      if (std::abs(signals[i].signal - expected) > 1e-10)
        throw std::runtime_error("spectrum: oracle cross-check failed on line m=" +
                                 std::to_string(signals[i].weight));
    }
    std::printf("oracle cross-check passed on %zu lines\n", signals.size());
  }

  // Line heights follow the ensemble's sector probabilities; intensity in
  // line_table is the unpolarized binomial reference, so rescale.
  std::vector<std::complex<double>> red_amps, blue_amps;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double scale = ensemble.components[i].probability / lines[i].intensity;
    red_amps.emplace_back(scale, 0);
    blue_amps.push_back(scale * signals[i].signal);
  }

  const auto grid =
      make_frequency_grid(cfg.spectrum_f_min_hz, cfg.spectrum_f_max_hz, cfg.spectrum_df_hz);
  const auto red = synthesize_spectrum(lines, red_amps, grid);
  const auto blue = synthesize_spectrum(lines, blue_amps, grid);

  const auto hash = config_hash(cfg);
  auto emit_trace = [&](const char* name, const SpectrumTrace<double>& trace) {
    std::string text = csv_preamble("spectrum", hash, cfg.seed, kSignTags,
                                    "freq_hz,re,im,magnitude");
    for (Eigen::Index i = 0; i < trace.frequency_hz.size(); ++i) {
      text += csv_row({trace.frequency_hz[i], trace.amplitude[i].real(),
                       trace.amplitude[i].imag(), std::abs(trace.amplitude[i])});
    }
    const auto path = out_path(cfg, name);
    write_text_file(path, text);
    std::printf("wrote %s\n", path.c_str());
  };
  emit_trace("spectrum_red.csv", red);
  emit_trace("spectrum_blue.csv", blue);

  if (opts.svg) {
    SvgSeries sr{"initial", "#c0392b", {}};
    SvgSeries sb{"post-protocol", "#2060c0", {}};
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      sr.points.push_back({grid[i], red.amplitude[i].real()});
      sb.points.push_back({grid[i], blue.amplitude[i].real()});
    }
    const auto path = out_path(cfg, "spectrum.svg");
    write_text_file(path, svg_chart("A-spin multiplet", "offset (Hz)", "absorption", {sr, sb}));
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep: per-line oscillation frequencies and detuning estimates.
// ---------------------------------------------------------------------------

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opts) {
  validate_run_config(cfg);
  const StarSystem& system = cfg.system;
  auto ensemble = build_thermal_ensemble<double>(system, cfg.b_polarization);
  ensemble = apply_noise(ensemble, make_noise_model(cfg));

  Eigen::VectorXd times(cfg.sweep_n_points);
  for (int i = 0; i < cfg.sweep_n_points; ++i) times[i] = i * cfg.sweep_dt_s;
  const auto sweep = sweep_t_wait(ensemble, cfg.experiment.b_off_tesla, times);
  const auto peaks = fft_oscillation(sweep, system);

  if (opts.oracle) {
    ExperimentConfig probe = cfg.experiment;
    for (std::size_t i = 0; i < sweep.lines.size(); ++i) {
      for (int step = 1; step <= 8; ++step) {
        const Eigen::Index j = step * (times.size() - 1) / 8;
        probe.t_wait_s = times[j];
        const auto expected = oracle_run<double>(pattern_of_weight(sweep.lines[i].weight),
                                                 probe, system) *
                              ensemble.components[i].coherence_factor;
        if (std::abs(sweep.signals(static_cast<Eigen::Index>(i), j) - expected) > 1e-10)
          throw std::runtime_error("sweep: oracle cross-check failed on line m=" +
                                   std::to_string(sweep.lines[i].weight));
      }
    }
    std::printf("oracle cross-check passed on %zu lines\n", sweep.lines.size());
  }

  auto tags = kSignTags;
  tags.push_back({"apodization", "exp(-t/tau), tau = t2_base*max(ell,1)^-kappa"});
  tags.push_back({"zero_padding", "4x"});
  tags.push_back({"snr_convention", "b_off_sigma = width/(ell*gamma_b)/snr, snr = 1"});
  std::string text = csv_preamble("sweep", config_hash(cfg), cfg.seed, tags,
                                  "line_m,ell_gamma,freq_hz,width_hz,b_off_estimate_T,b_off_sigma_T");
  for (const auto& peak : peaks) {
    const auto est = estimate_detuning(peak.freq_hz, peak.width_hz, peak.lopsidedness, system);
    text += csv_row({double(peak.weight), peak.lopsidedness, peak.freq_hz, peak.width_hz,
                     est.b_off_tesla, est.sigma_tesla});
  }
  const auto path = out_path(cfg, "sweep_peaks.csv");
  write_text_file(path, text);
  std::printf("wrote %s\n", path.c_str());

  if (opts.svg) {
    SvgSeries measured{"measured peaks", "#2060c0", {}};
    SvgSeries ideal{"ell*gamma_b*b_off", "#999999", {}};
    auto sorted = peaks;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.lopsidedness < b.lopsidedness; });
    for (const auto& p : sorted) measured.points.push_back({p.lopsidedness, p.freq_hz});
    const double slope = system.gamma_b * 1e6 * std::abs(cfg.experiment.b_off_tesla);
    ideal.points.push_back({0, 0});
    ideal.points.push_back({sorted.back().lopsidedness, slope * sorted.back().lopsidedness});
    const auto svg_path = out_path(cfg, "sweep.svg");
    write_text_file(svg_path, svg_chart("oscillation frequency vs lopsidedness", "ell_gamma",
                                        "frequency (Hz)", {ideal, measured}));
    std::printf("wrote %s\n", svg_path.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// fig3: spin vs optical sensitivity scaling under noise.
// ---------------------------------------------------------------------------

int cmd_fig3(const RunConfig& cfg, const CommandOptions& opts) {
  validate_run_config(cfg);
  const auto result = figure3_curves(cfg.fig3_epsilons, cfg.fig3_n_max, cfg.fig3_m_shots,
                                     cfg.fig3_t_e_ref_s, cfg.fig3_epsilon_mapping);

  std::vector<MetadataTag> tags = {
      {"normalization", Figure3Result::normalization},
      {"epsilon_mapping", std::string(epsilon_mapping_name(result.mapping)) +
                              (result.mapping == EpsilonMapping::gaussian
                                   ? " (sigma^2 = -2 ln(1-eps))"
                                   : " (phase randomized with probability eps)")},
      {"epsilon_window", "per spin/photon per exposure"},
      {"optical_model", "shot informative only if all n photons survive"},
      {"reference_column", "heisenberg raw std 1/(n sqrt(m_shots))"},
  };
  std::string text = csv_preamble("fig3", config_hash(cfg), cfg.seed, tags,
                                  "family,epsilon,n,raw_std,normalized_std,optimal_te_s,reference");
  const double sqrt_m = std::sqrt(static_cast<double>(result.m_shots));
  for (const auto& curve : result.curves) {
    for (const auto& p : curve.points) {
      text += curve.family + "," + format_number(curve.epsilon) + "," + std::to_string(p.n) + "," +
              format_number(p.raw_std) + "," + format_number(p.normalized_std) + "," +
              format_number(p.optimal_te_s) + "," + format_number(1.0 / (p.n * sqrt_m)) + "\n";
    }
  }
  const auto path = out_path(cfg, "fig3_curves.csv");
  write_text_file(path, text);
  std::printf("wrote %s\n", path.c_str());

  if (opts.svg) {
    const std::vector<std::string> spin_colors = {"#c0392b", "#e67e22", "#8e44ad"};
    const std::vector<std::string> optical_colors = {"#2060c0", "#16a085", "#2c3e50"};
    std::vector<SvgSeries> series;
    int spin_i = 0, optical_i = 0;
    for (const auto& curve : result.curves) {
      SvgSeries s;
      if (curve.family == "sql") {
        s = {"SQL", "#999999", {}};
      } else if (curve.family == "heisenberg") {
        s = {"Heisenberg", "#444444", {}};
      } else if (curve.family == "spin") {
        s = {"spin eps=" + format_number(curve.epsilon),
             spin_colors[spin_i++ % spin_colors.size()], {}};
      } else {
        s = {"optical eps=" + format_number(curve.epsilon),
             optical_colors[optical_i++ % optical_colors.size()], {}};
      }
      for (const auto& p : curve.points) s.points.push_back({double(p.n), p.normalized_std});
      series.push_back(std::move(s));
    }
    const auto svg_path = out_path(cfg, "fig3.svg");
    write_text_file(svg_path, svg_chart("phase std per particle vs n", "n",
                                        "std * sqrt(n)", series, true, true));
    std::printf("wrote %s\n", svg_path.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// validate: oracle equivalence and invariant suite.
// ---------------------------------------------------------------------------

namespace {

struct CheckLog {
  int passed = 0;
  int failed = 0;
  void report(const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %-26s %s\n", ok ? " ok " : "FAIL", name, detail.c_str());
    (ok ? passed : failed) += 1;
  }
};

std::complex<double> compressed_signal(int weight, const ExperimentConfig& ec,
                                       const StarSystem& system) {
  const auto final_state = protocol_final_state(BranchPair<double>::ground(weight), ec, system);
  return 2.0 * std::conj(final_state.coeffs(0, 0)) * final_state.coeffs(1, 0);
}

BranchPair<double> random_state(int weight, SplitMix64& rng) {
  BranchPair<double> s;
  s.weight = weight;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      s.coeffs(a, b) = std::complex<double>(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1);
  return s.normalized();
}

}  // namespace

int cmd_validate(const RunConfig& cfg, const CommandOptions&) {
  validate_run_config(cfg);
  const StarSystem& system = cfg.system;
  CheckLog log;

  // Compressed path vs explicit state-vector gates, random patterns and
  // random (b_off, t_wait) pairs for every weight sector.
  {
    SplitMix64 rng(cfg.seed, 1);
    double worst = 0;
    for (int m = 0; m <= system.n_b; ++m) {
      for (int p = 0; p < cfg.validate_n_random_pairs; ++p) {
        ExperimentConfig ec;
        ec.b_off_tesla = (rng.uniform() * 2 - 1) * 1e-5;
        ec.t_wait_s = rng.uniform() * 2e-3;
        auto sig = compressed_signal(m, ec, system);
        if (cfg.validate_corrupt_gate) sig *= std::polar(1.0, 0.05);  // fault injection
        const auto ref = oracle_run<double>(random_pattern_of_weight(m, system.n_b, rng), ec, system);
        worst = std::max(worst, std::abs(sig - ref));
      }
    }
    log.report("oracle equivalence", worst <= 1e-10,
               fmt("max |compressed - oracle| = %.3g over %.0f runs", worst,
                   double((system.n_b + 1) * cfg.validate_n_random_pairs)));
  }

  // Collective gates cannot tell equal-weight patterns apart.
  {
    SplitMix64 rng(cfg.seed, 2);
    double worst = 0;
    for (int m = 1; m < system.n_b; ++m) {
      const auto ref = oracle_run<double>(random_pattern_of_weight(m, system.n_b, rng),
                                          cfg.experiment, system);
      const auto alt = oracle_run<double>(random_pattern_of_weight(m, system.n_b, rng),
                                          cfg.experiment, system);
      worst = std::max(worst, std::abs(ref - alt));
    }
    log.report("equal-weight patterns", worst <= 1e-10,
               fmt("max signal difference = %.3g", worst));
  }

  // Unitarity of the compressed gate set on random family states.
  {
    SplitMix64 rng(cfg.seed, 3);
    double worst = 0;
    for (int rep = 0; rep < 25; ++rep) {
      const int m = static_cast<int>(rng() % std::uint64_t(system.n_b + 1));
      ExperimentConfig ec;
      ec.b_off_tesla = (rng.uniform() * 2 - 1) * 1e-5;
      ec.t_wait_s = rng.uniform() * 2e-3;
      auto s = random_state(m, rng);
      for (const auto& step : {apply_hadamard_a(s), apply_global_cnot(s),
                               free_evolve(s, ec, system), protocol_final_state(s, ec, system)})
        worst = std::max(worst, std::abs(std::sqrt(step.squared_norm()) - 1));
    }
    log.report("norm preservation", worst <= 1e-12, fmt("max |norm - 1| = %.3g", worst));
  }

  // Zero detuning: the entangling block is the identity up to a global
  // phase, and every line reports phase 0 at magnitude 1.
  {
    SplitMix64 rng(cfg.seed, 4);
    ExperimentConfig ec;
    ec.b_off_tesla = 0;
    ec.t_wait_s = 1e-3 + rng.uniform() * 1e-3;
    double worst = 0;
    for (int m = 0; m <= system.n_b; ++m) {
      const auto ground = BranchPair<double>::ground(m);
      const auto f = protocol_final_state(ground, ec, system);
      const auto h = apply_hadamard_a(ground);
      const auto overlap = (h.coeffs.conjugate().cwiseProduct(f.coeffs)).sum();
      worst = std::max(worst, std::abs(std::abs(overlap) - 1));
      worst = std::max(worst, (f.coeffs - overlap * h.coeffs).norm());
      const auto sig = 2.0 * std::conj(f.coeffs(0, 0)) * f.coeffs(1, 0);
      worst = std::max(worst, std::abs(sig - std::complex<double>(1, 0)));
    }
    log.report("identity at zero detuning", worst <= 1e-12, fmt("max deviation = %.3g", worst));
  }

  // J during the wait drops out of every line signal.
  {
    SplitMix64 rng(cfg.seed, 5);
    double worst = 0;
    const auto ensemble = build_thermal_ensemble<double>(system, cfg.b_polarization);
    for (int rep = 0; rep < 10; ++rep) {
      ExperimentConfig on, off;
      on.b_off_tesla = off.b_off_tesla = (rng.uniform() * 2 - 1) * 1e-5;
      on.t_wait_s = off.t_wait_s = rng.uniform() * 2e-3;
      on.include_j_during_wait = true;
      off.include_j_during_wait = false;
      const auto a = run_noon_protocol(ensemble, on);
      const auto b = run_noon_protocol(ensemble, off);
      for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i].signal - b[i].signal));
    }
    log.report("j-coupling cancellation", worst <= 1e-12, fmt("max signal shift = %.3g", worst));
  }

  // Sampled dephasing vs the analytic attenuation factors.
  {
    double worst_z = 0;
    bool ok = true;
    const auto probe = BranchPair<double>::ground(0);
    int cell = 0;
    for (const double sa : {0.0, 0.1, 0.5}) {
      for (const double sb : {0.0, 0.1, 0.5}) {
        const auto stats = monte_carlo_dephase(probe, sa, sb, system,
                                               cfg.seed + 100 + cell++, cfg.validate_mc_trials);
        const double analytic = local_dephasing_factor(sa, sb, system);
        if (sa == 0 && sb == 0) {
          ok = ok && stats.attenuation == 1.0;
        } else {
          const double z = std::abs(stats.attenuation - analytic) / stats.std_error;
          worst_z = std::max(worst_z, z);
          ok = ok && z <= 3.0;
        }
      }
    }
    log.report("monte carlo dephasing", ok,
               fmt("worst |z| = %.2f over 3x3 sigma grid, %.0f trials", worst_z,
                   double(cfg.validate_mc_trials)));
  }

  // Sampled estimator variance vs the exact shot-budget calculus, on a
  // homonuclear star so the probe is a clean (n_b + 1)-particle cat.
  {
    StarSystem homo = system;
    homo.gamma_a = homo.gamma_b;
    const double sigma = 0.1;
    MetrologyConfig mc;
    mc.n = homo.n_b + 1;
    mc.t_e_s = 1e-3;
    mc.t_tot_s = static_cast<double>(cfg.validate_estimate_shots) * mc.t_e_s;
    mc.var_h = (sigma / mc.t_e_s) * (sigma / mc.t_e_s);
    mc.readout_phase_std_rad = 1.0;
    const double b_true = 3.13e-8;
    const auto res = monte_carlo_estimate<double>(homo, LocalDephasing{sigma, sigma}, b_true, mc,
                                                  cfg.seed + 200);
    const double m_shots = static_cast<double>(mc.m_shots());
    const double rate_to_tesla = 2 * std::numbers::pi * homo.gamma_b * 1e6;
    const double per_shot_var = field_variance(mc).exact * m_shots / (rate_to_tesla * rate_to_tesla);
    const double rel_tol = 3 * std::sqrt(2 / (m_shots - 1));
    const double rel_err = std::abs(res.sample_variance - per_shot_var) / per_shot_var;
    const bool mean_ok =
        std::abs(res.mean_b_tesla - b_true) <= 5 * std::sqrt(per_shot_var / m_shots);
    log.report("estimator variance", rel_err <= rel_tol && mean_ok,
               fmt("relative error = %.3g (tolerance %.3g)", rel_err, rel_tol));
  }

  // Closed-form exposure optimum vs a 1001-point log-spaced grid search.
  {
    bool ok = true;
    double worst_gap = 0;
    for (const double var_h : {0.3, 1.0, 7.0}) {
      for (const int n : {1, 4, 32, 256}) {
        const double te_star = optimal_exposure(n, var_h);
        MetrologyConfig probe;
        probe.n = n;
        probe.var_h = var_h;
        probe.t_tot_s = 200 * te_star;
        auto value = [&](double te) {
          probe.t_e_s = te;
          return field_variance(probe).approximate;
        };
        const double v_star = value(te_star);
        const double log_step = std::log(1e4) / 1000;
        double best_te = te_star, best_v = v_star;
        for (int i = 0; i <= 1000; ++i) {
          const double te = te_star * 1e-2 * std::exp(log_step * i);
          const double v = value(te);
          if (v < best_v) { best_v = v; best_te = te; }
        }
        ok = ok && v_star <= best_v * (1 + 1e-12) &&
             std::abs(std::log(best_te / te_star)) <= log_step;
        worst_gap = std::max(worst_gap, (v_star - best_v) / best_v);
      }
    }
    log.report("exposure optimizer", ok, fmt("closed form vs grid gap = %.3g", worst_gap));
  }

  // Closed-form photonic optimum vs brute force.
  {
    bool ok = true;
    for (const double eps : {0.01, 0.05, 0.1, 0.2, 0.5}) {
      int brute = 1;
      double best = -1e300;
      for (int n = 1; n <= 400; ++n) {
        const double v = 2 * std::log(double(n)) + n * std::log1p(-eps);
        if (v > best) { best = v; brute = n; }
      }
      ok = ok && optimal_photonic_size(eps) == brute;
    }
    log.report("photonic optimizer", ok, "argmax n^2 (1-eps)^n matched exactly");
  }

  const bool all_ok = log.failed == 0;
  std::printf("validate: %d/%d checks passed\n", log.passed, log.passed + log.failed);
  return all_ok ? 0 : 1;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::system_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace starsense
