#pragma once

#include "mmdelay/config.hpp"
#include "mmdelay/table.hpp"

namespace mmdelay::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitUnstable = 3,
  kExitDominance = 4,
};

struct CommandOutput {
  Table table;
  int exit_code = kExitOk;
};

/// Delay bounds per series and sweep value; invert mode reports the
/// smallest w meeting bound.epsilon instead. Unstable rows are recorded,
/// and only fail the run under `strict`.
CommandOutput cmd_bound_sweep(const ExperimentConfig& cfg, bool strict = false);

/// Simulated P(W >= w) against the analytic bound on the w sweep. Exits with
/// kExitDominance when some frequency exceeds bound + CI half-width.
CommandOutput cmd_sim_validate(const ExperimentConfig& cfg, bool strict = false);

/// Effective capacity of dispersion (m = n), densification (k = n) and the
/// configured hybrid, plus the path-count argmax over divisors of n.
CommandOutput cmd_effcap_sweep(const ExperimentConfig& cfg, bool strict = false);

/// Per-hop stability limits, utilization and admission at the QoS theta.
CommandOutput cmd_stability(const ExperimentConfig& cfg, bool strict = false);

}  // namespace mmdelay::cli
