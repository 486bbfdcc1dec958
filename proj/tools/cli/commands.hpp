#pragma once

#include "handles.hpp"
#include "run_config.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace fieldline::cli {

/// result of one (sub-)run: exit code, a failure message, and summary lines for stdout
struct RunOutcome {
    int exitCode = ExitOk;
    std::string message;
    std::vector<std::string> summary;
};

ProfileHandle buildProfile(const RunConfig& config);
fl_particle resolveParticle(const RunConfig& config, const fl_profile* profile);

struct MethodRun {
    fl_method method;
    TrajectoryHandle trajectory;  ///< null when the method does not apply
    std::string note;
};

/** JSON comparison report: per-method residuals, pairwise position deviations and, for the
    exponential field with an ODE run, which logarithmic form y(t) = log(l sin(alpha t) + m_aux)
    the integrated y(t) follows (the one derived from the constants or an alternative given
    in compare.plotted_y). */
nlohmann::ordered_json comparisonReport(const RunConfig& config, const fl_profile* profile,
                                        const fl_particle& particle, const std::vector<MethodRun>& runs);

RunOutcome cmdTrajectory(const RunConfig& config);
RunOutcome cmdField(const RunConfig& config);
RunOutcome cmdSusy(const RunConfig& config);
RunOutcome cmdCompare(const RunConfig& config);

/// run `command` on the configuration, or concurrently on each of its sub-runs;
/// summaries are printed in run order, the first failing run decides the exit code
int dispatch(const RunConfig& config, RunOutcome (*command)(const RunConfig&));

}  // namespace fieldline::cli
