#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "icflow/io.hpp"

namespace icflow {

/// Process exit codes shared by every command.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,     ///< bad configuration or invalid initial data
    kExitFlow = 2,       ///< flow ended in a failure status
    kExitAssertion = 3,  ///< a declared assertion of the command failed
    kExitRuntime = 4,    ///< anything else (I/O, sampler exhaustion)
};

/// Relative tolerance on measured linearised decay rates.
inline constexpr double kRateTolerance = 0.10;
/// Margins below this count as inequality violations in sweeps.
inline constexpr double kSweepViolation = -1e-8;
/// Equality cases on centered circles must vanish to this.
inline constexpr double kEqualityTolerance = 1e-8;
/// Relative change of the counterexample gap allowed under N -> 2N.
inline constexpr double kRefinementTolerance = 0.01;
/// Relative deviation from exact quadratic scaling allowed for the gap.
inline constexpr double kScalingTolerance = 0.20;
/// Residuals below this sit at the rounding floor and are excluded from order fits.
inline constexpr double kResidualFloor = 1e-12;

const std::vector<std::string>& command_names();

/// Runs one subcommand, writing artifacts under out. Configuration problems
/// become kExitConfig with the message on err; progress lines go to log.
int run_command(const std::string& name, const ExperimentConfig& cfg, const std::filesystem::path& out,
                std::ostream& log, std::ostream& err);

int cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_report(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_counterexample(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_rate_study(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_convergence_study(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);

}  // namespace icflow
