// Command-line front end: spectrum | sweep | fig3 | validate.
//
// Exit codes: 0 success, 1 analysis/validation failure, 2 bad configuration
// or usage, 3 file-system trouble.

#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "starsense/io/commands.hpp"
#include "starsense/io/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"star-topology spin sensing: NOON spectra, wait-time sweeps, scaling curves"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool svg = false;
  bool oracle = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--out", out_dir, "output directory (overrides config out_dir)");
    sub->add_option("--seed", seed, "rng seed (overrides config seed)");
    sub->add_flag("--svg", svg, "also write an svg chart");
    sub->add_flag("--oracle", oracle, "cross-check compressed states against the state-vector oracle");
    return sub;
  };
  add_common(app.add_subcommand("spectrum", "emit initial and post-protocol A-spin multiplets"));
  add_common(app.add_subcommand("sweep", "wait-time sweep: per-line peak frequencies and detuning estimates"));
  add_common(app.add_subcommand("fig3", "sensitivity scaling of noisy spin vs optical probes"));
  add_common(app.add_subcommand("validate", "oracle equivalence and invariant checks"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version keep 0, usage errors map to 2
  }

  return starsense::run_guarded([&]() -> int {
    starsense::RunConfig cfg;
    if (!config_path.empty()) cfg = starsense::load_run_config(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--out") > 0) cfg.out_dir = out_dir;
    if (sub->count("--seed") > 0) cfg.seed = seed;
    const starsense::CommandOptions opts{svg, oracle};

    const std::string& name = sub->get_name();
    if (name == "spectrum") return starsense::cmd_spectrum(cfg, opts);
    if (name == "sweep") return starsense::cmd_sweep(cfg, opts);
    if (name == "fig3") return starsense::cmd_fig3(cfg, opts);
    return starsense::cmd_validate(cfg, opts);
  });
}
