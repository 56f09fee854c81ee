#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "starsense/gates.hpp"
#include "starsense/metrology.hpp"
#include "starsense/noise.hpp"
#include "starsense/star_system.hpp"

namespace starsense {

// ---------------------------------------------------------------------------
// Flat key=value run configuration ('#' starts a comment). Unknown keys are
// rejected; every value is validated against its type's invariants on load.
// ---------------------------------------------------------------------------

struct RunConfig {
  StarSystem system;
  double b_polarization = 0.5;  // system.b_polarization: P(B spin up) in the bath
  ExperimentConfig experiment;

  // spectrum.*: synthesis grid
  double spectrum_f_min_hz = -65;
  double spectrum_f_max_hz = 65;
  double spectrum_df_hz = 0.25;

  // sweep.*: T_wait grid
  int sweep_n_points = 4096;
  double sweep_dt_s = 5e-5;

  // fig3.*: sensitivity comparison
  std::vector<double> fig3_epsilons{0.05, 0.1, 0.2};
  int fig3_n_max = 1024;
  long long fig3_m_shots = 1000;
  double fig3_t_e_ref_s = 1e-3;
  EpsilonMapping fig3_epsilon_mapping = EpsilonMapping::gaussian;

  // noise.*: channel applied to the spin ensemble before the protocol
  std::string noise_model = "local";  // local | global | photon
  double noise_sigma_a = 0;
  double noise_sigma_b = 0;
  double noise_sigma_global = 0;
  double noise_epsilon = 0;

  // validate.*: self-check suite
  bool validate_corrupt_gate = false;  // fault-injection hook
  long long validate_mc_trials = 100000;
  long long validate_estimate_shots = 10000;
  int validate_n_random_pairs = 20;

  std::uint64_t seed = 20260816;
  std::string out_dir = "out";
};

// Parses key=value text; throws std::invalid_argument on unknown keys,
// malformed values, or invariant violations.
RunConfig parse_run_config(const std::string& text);

// Reads and parses a config file; file-system problems surface as
// std::system_error derivatives.
RunConfig load_run_config(const std::string& path);

void validate_run_config(const RunConfig& cfg);

// Canonical serialization: one sorted "key = value" line per key. Identical
// configurations serialize identically, so the hash is stable across runs.
std::string canonical_config_text(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& text);
std::uint64_t config_hash(const RunConfig& cfg);

// The dephasing/loss channel selected by noise.*.
NoiseModel make_noise_model(const RunConfig& cfg);

}  // namespace starsense
