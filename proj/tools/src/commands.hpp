#pragma once

#include "run_config.hpp"

namespace ldg::cli {

int cmd_train(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg);
int cmd_analyze(const RunConfig& cfg);
int cmd_synth(const RunConfig& cfg);
int cmd_baseline(const RunConfig& cfg);

/// Resolves the run directory: uses the configured `out` (which must not
/// already hold files) or creates a timestamped directory under runs/.
std::string prepare_run_dir(const RunConfig& cfg);

}  // namespace ldg::cli
