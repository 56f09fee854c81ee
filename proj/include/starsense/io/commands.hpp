#pragma once

#include <functional>

#include "starsense/io/config.hpp"

namespace starsense {

// ---------------------------------------------------------------------------
// Command layer behind the CLI. Each command writes its artifacts under
// cfg.out_dir and returns an exit code: 0 success, 1 failed validation or
// analysis, 2 configuration error, 3 I/O error.
// ---------------------------------------------------------------------------

struct CommandOptions {
  bool svg = false;     // also emit convenience SVG plots
  bool oracle = false;  // cross-check compressed signals against the full-state oracle
};

int cmd_spectrum(const RunConfig& cfg, const CommandOptions& opts);
int cmd_sweep(const RunConfig& cfg, const CommandOptions& opts);
int cmd_fig3(const RunConfig& cfg, const CommandOptions& opts);
int cmd_validate(const RunConfig& cfg, const CommandOptions& opts);

// Runs a command body, translating exceptions to the exit-code contract.
int run_guarded(const std::function<int()>& body);

}  // namespace starsense
