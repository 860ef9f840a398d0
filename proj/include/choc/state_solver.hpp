#pragma once

#include <string>
#include <vector>

#include "choc/cost.hpp"
#include "choc/model.hpp"

namespace choc {

struct HypothesisCheck {
    std::string name;
    bool ok = true;
    std::string detail;
};

struct HypothesesReport {
    std::vector<HypothesisCheck> checks;
    double h9_margin = 0.0;   // min(inf phi0 - r_minus, r_plus - sup phi0)
    double h10_norm = 0.0;    // ||(1/beta)(mu0 + Lap phi0 - B(phi0) - pi(phi0))||, reported only
    bool all_ok() const;
    std::string first_failure() const;
};

/// Checks H1-H4 and H9 and reports the H10 norm. Never throws.
HypothesesReport check_hypotheses(const ControlProblem& problem);

/// Same checks, throwing ConfigError naming the first violated hypothesis.
HypothesesReport validate_hypotheses(const ControlProblem& problem);

/// One fully implicit Euler step: monolithic Newton on the stacked
/// (mu, phi, sigma) unknown, with domain-guard damping for singular
/// potentials. Throws SolverError on Newton failure and DomainViolation
/// when damping cannot keep phi interior.
StateTriple step_state(const StateTriple& prev, const Field& u_next, const ModelParams& params,
                       StepStats* stats = nullptr);

/// Chains step_state over n = 1..nt. Step errors are rethrown annotated with
/// the failing time index.
Trajectory solve_state(const StateTriple& initial, const ControlTrajectory& u,
                       const ModelParams& params);

/// Per-step residuals of the summed balance
/// d/dt int(alpha*mu + phi + sigma) = int u.
std::vector<double> mass_ledger(const Trajectory& traj, const ControlTrajectory& u);

struct SeparationReport {
    double phi_min = 0.0;
    double phi_max = 0.0;
    double margin = 0.0;  // min(phi_min - r_minus, r_plus - phi_max); +inf when unbounded
};

SeparationReport separation_report(const Trajectory& traj, const Potential& pot);

/// Residual of the three step equations at a candidate new state (diagnostic;
/// also used by the Newton loop and by tests).
void state_step_residual(const StateTriple& next, const StateTriple& prev, const Field& u_next,
                         const ModelParams& params, std::span<double> out);

}  // namespace choc
