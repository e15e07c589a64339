#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "selrec/cli/config.hpp"

namespace selrec::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kVerificationFailed = 3 };

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::string> method;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicates;
    int threads = 0;  // 0: SELREC_THREADS or 1
};

/// Folds command-line overrides into the configuration and refreshes its hash.
ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& opts);

/// Each command writes its files into opts.out_dir and returns an exit code.
/// Primary outputs depend only on (config, seed, replicates); wall-clock
/// times and the thread count go to a separate timing_<command>.json.
int cmd_solve(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_dual(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_moran(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_verify(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_asymptotics(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_ld(const ExperimentConfig& cfg, const RunOptions& opts);

/// Dispatches by subcommand name, mapping exceptions to exit codes and
/// printing messages to stderr.
int run(const std::string& command, const std::string& config_path, const RunOptions& opts);

}  // namespace selrec::cli
