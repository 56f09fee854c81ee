#include "starsense/io/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace starsense {

namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(ws);
  return std::string(s.substr(begin, end - begin + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: bad value for " + key + ": '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) bad_value(key, value);
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) bad_value(key, value);
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) bad_value(key, value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto piece = trim(value.substr(start, comma == std::string::npos ? std::string::npos
                                                                           : comma - start));
    if (piece.empty()) bad_value(key, value);
    out.push_back(parse_double(key, piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) bad_value(key, value);
  return out;
}

std::string format_exact(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  using Handler = std::function<void(RunConfig&, const std::string&, const std::string&)>;
  static const std::map<std::string, Handler> handlers = {
      {"system.n_b", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.system.n_b = static_cast<int>(parse_int(k, v)); }},
      {"system.gamma_a", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.system.gamma_a = parse_double(k, v); }},
      {"system.gamma_b", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.system.gamma_b = parse_double(k, v); }},
      {"system.j_coupling", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.system.j_coupling = parse_double(k, v); }},
      {"system.t2_base", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.system.t2_base = parse_double(k, v); }},
      {"system.kappa", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.system.kappa = parse_double(k, v); }},
      {"system.b_polarization", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.b_polarization = parse_double(k, v); }},
      {"experiment.b_off_tesla", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.experiment.b_off_tesla = parse_double(k, v); }},
      {"experiment.t_wait_s", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.experiment.t_wait_s = parse_double(k, v); }},
      {"experiment.include_j_during_wait",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.experiment.include_j_during_wait = parse_bool(k, v); }},
      {"spectrum.f_min_hz", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.spectrum_f_min_hz = parse_double(k, v); }},
      {"spectrum.f_max_hz", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.spectrum_f_max_hz = parse_double(k, v); }},
      {"spectrum.df_hz", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.spectrum_df_hz = parse_double(k, v); }},
      {"sweep.n_points", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sweep_n_points = static_cast<int>(parse_int(k, v)); }},
      {"sweep.dt_s", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sweep_dt_s = parse_double(k, v); }},
      {"fig3.epsilons", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fig3_epsilons = parse_double_list(k, v); }},
      {"fig3.n_max", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fig3_n_max = static_cast<int>(parse_int(k, v)); }},
      {"fig3.m_shots", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fig3_m_shots = parse_int(k, v); }},
      {"fig3.t_e_ref_s", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.fig3_t_e_ref_s = parse_double(k, v); }},
      {"fig3.epsilon_mapping", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "gaussian") c.fig3_epsilon_mapping = EpsilonMapping::gaussian;
         else if (v == "erasure") c.fig3_epsilon_mapping = EpsilonMapping::erasure;
         else bad_value(k, v); }},
      {"noise.model", [](RunConfig& c, const std::string&, const std::string& v) {
         c.noise_model = v; }},
      {"noise.sigma_a", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.noise_sigma_a = parse_double(k, v); }},
      {"noise.sigma_b", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.noise_sigma_b = parse_double(k, v); }},
      {"noise.sigma_global", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.noise_sigma_global = parse_double(k, v); }},
      {"noise.epsilon", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.noise_epsilon = parse_double(k, v); }},
      {"validate.corrupt_gate", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.validate_corrupt_gate = parse_bool(k, v); }},
      {"validate.mc_trials", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.validate_mc_trials = parse_int(k, v); }},
      {"validate.estimate_shots", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.validate_estimate_shots = parse_int(k, v); }},
      {"validate.n_random_pairs", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.validate_n_random_pairs = static_cast<int>(parse_int(k, v)); }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = parse_u64(k, v); }},
      {"out_dir", [](RunConfig& c, const std::string&, const std::string& v) {
         c.out_dir = v; }},
  };

  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not key=value: '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = handlers.find(key);
    if (it == handlers.end())
      throw std::invalid_argument("config: unknown key '" + key + "'");
    it->second(cfg, key, value);
  }
  validate_run_config(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw std::ios_base::failure("config: error reading '" + path + "'");
  return parse_run_config(buffer.str());
}

void validate_run_config(const RunConfig& cfg) {
  cfg.system.validate();
  cfg.experiment.validate();
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (!(cfg.b_polarization >= 0 && cfg.b_polarization <= 1))
    fail("system.b_polarization outside [0, 1]");
  if (!(cfg.spectrum_f_max_hz > cfg.spectrum_f_min_hz)) fail("spectrum.f_max_hz <= f_min_hz");
  if (!(cfg.spectrum_df_hz > 0)) fail("spectrum.df_hz must be > 0");
  if (cfg.sweep_n_points < 8) fail("sweep.n_points must be >= 8");
  if (!(cfg.sweep_dt_s > 0)) fail("sweep.dt_s must be > 0");
  if (cfg.fig3_epsilons.empty()) fail("fig3.epsilons must be nonempty");
  for (const double eps : cfg.fig3_epsilons)
    if (eps < 0 || eps >= 1) fail("fig3.epsilons entries must be in [0, 1)");
  if (cfg.fig3_n_max < 2) fail("fig3.n_max must be >= 2");
  if (cfg.fig3_m_shots < 1) fail("fig3.m_shots must be >= 1");
  if (!(cfg.fig3_t_e_ref_s > 0)) fail("fig3.t_e_ref_s must be > 0");
  if (cfg.noise_model != "local" && cfg.noise_model != "global" && cfg.noise_model != "photon")
    fail("noise.model must be local, global, or photon");
  if (cfg.noise_sigma_a < 0 || cfg.noise_sigma_b < 0 || cfg.noise_sigma_global < 0)
    fail("noise sigmas must be >= 0");
  if (cfg.noise_epsilon < 0 || cfg.noise_epsilon >= 1) fail("noise.epsilon outside [0, 1)");
  if (cfg.validate_mc_trials < 1) fail("validate.mc_trials must be >= 1");
  if (cfg.validate_estimate_shots < 2) fail("validate.estimate_shots must be >= 2");
  if (cfg.validate_n_random_pairs < 1) fail("validate.n_random_pairs must be >= 1");
}

std::string canonical_config_text(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> entries;
  auto put = [&](const std::string& k, const std::string& v) { entries.emplace_back(k, v); };
  put("system.n_b", std::to_string(cfg.system.n_b));
  put("system.gamma_a", format_exact(cfg.system.gamma_a));
  put("system.gamma_b", format_exact(cfg.system.gamma_b));
  put("system.j_coupling", format_exact(cfg.system.j_coupling));
  put("system.t2_base", format_exact(cfg.system.t2_base));
  put("system.kappa", format_exact(cfg.system.kappa));
  put("system.b_polarization", format_exact(cfg.b_polarization));
  put("experiment.b_off_tesla", format_exact(cfg.experiment.b_off_tesla));
  put("experiment.t_wait_s", format_exact(cfg.experiment.t_wait_s));
  put("experiment.include_j_during_wait", cfg.experiment.include_j_during_wait ? "true" : "false");
  put("spectrum.f_min_hz", format_exact(cfg.spectrum_f_min_hz));
  put("spectrum.f_max_hz", format_exact(cfg.spectrum_f_max_hz));
  put("spectrum.df_hz", format_exact(cfg.spectrum_df_hz));
  put("sweep.n_points", std::to_string(cfg.sweep_n_points));
  put("sweep.dt_s", format_exact(cfg.sweep_dt_s));
  std::string eps;
  for (std::size_t i = 0; i < cfg.fig3_epsilons.size(); ++i) {
    if (i) eps += ",";
    eps += format_exact(cfg.fig3_epsilons[i]);
  }
  put("fig3.epsilons", eps);
  put("fig3.n_max", std::to_string(cfg.fig3_n_max));
  put("fig3.m_shots", std::to_string(cfg.fig3_m_shots));
  put("fig3.t_e_ref_s", format_exact(cfg.fig3_t_e_ref_s));
  put("fig3.epsilon_mapping", epsilon_mapping_name(cfg.fig3_epsilon_mapping));
  put("noise.model", cfg.noise_model);
  put("noise.sigma_a", format_exact(cfg.noise_sigma_a));
  put("noise.sigma_b", format_exact(cfg.noise_sigma_b));
  put("noise.sigma_global", format_exact(cfg.noise_sigma_global));
  put("noise.epsilon", format_exact(cfg.noise_epsilon));
  put("validate.corrupt_gate", cfg.validate_corrupt_gate ? "true" : "false");
  put("validate.mc_trials", std::to_string(cfg.validate_mc_trials));
  put("validate.estimate_shots", std::to_string(cfg.validate_estimate_shots));
  put("validate.n_random_pairs", std::to_string(cfg.validate_n_random_pairs));
  put("seed", std::to_string(cfg.seed));
  // out_dir deliberately omitted: it changes where files land, not what they contain
  std::sort(entries.begin(), entries.end());
  std::string text;
  for (const auto& [k, v] : entries) text += k + " = " + v + "\n";
  return text;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a64(canonical_config_text(cfg)); }

NoiseModel make_noise_model(const RunConfig& cfg) {
  if (cfg.noise_model == "local") return LocalDephasing{cfg.noise_sigma_a, cfg.noise_sigma_b};
  if (cfg.noise_model == "global") return GlobalDephasing{cfg.noise_sigma_global};
  if (cfg.noise_model == "photon") return PhotonLoss{cfg.noise_epsilon};
  throw std::invalid_argument("config: noise.model must be local, global, or photon");
}

}  // namespace starsense
