#pragma once

#include <map>
#include <string>

#include "choc/cost.hpp"
#include "choc/optimize.hpp"

namespace choc {

/// Fully validated run specification assembled from a config file.
struct RunSpec {
    ControlProblem problem;
    ControlTrajectory u_init;     // [control] init
    ControlTrajectory direction;  // [control] direction, used by `linearize`
    OptimizerOptions optimizer;
    std::string output_dir = "out";
    unsigned long long seed = 42;

    /// Canonical section.key -> value map (defaults filled in); basis for
    /// serialization and equality.
    std::map<std::string, std::string> raw;
};

/// Strict parser for the flat INI-style format (sections [grid], [model],
/// [potential], [cost], [control], [solver], [optimizer], [output]).
/// Unknown keys are errors; hypotheses are validated before returning.
RunSpec parse_config(const std::string& path);

/// Same, from an in-memory string (tests).
RunSpec parse_config_text(const std::string& text);

/// Canonical text form; parse_config_text(serialize_config(s)) == s.
std::string serialize_config(const RunSpec& spec);

bool operator==(const RunSpec& a, const RunSpec& b);

}  // namespace choc
