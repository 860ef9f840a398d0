#pragma once

#include <string>
#include <vector>

#include "choc/adjoint.hpp"
#include "choc/cost.hpp"

namespace choc {

/// Reduced cost of a control: forward solve + evaluate_cost.
double reduced_cost(const ControlTrajectory& u, const ControlProblem& problem);

/// Reduced gradient g_n = r_{paired with interval n} + b0 * u_n, with r from
/// the exact-transpose adjoint at the state S(u).
ControlTrajectory reduced_gradient(const ControlTrajectory& u, const ControlProblem& problem,
                                   const FaultInjection& fault = {});

/// Pointwise clip into [u_*, u^*]; idempotent and L2-nonexpansive.
ControlTrajectory project_box(const ControlTrajectory& u, const ControlBox& box);

/// ||u - project_box(u - g)||_{L2(Q)}; zero iff the discrete variational
/// inequality holds.
double stationarity_residual(const ControlTrajectory& u, const ControlTrajectory& g,
                             const ControlBox& box, double dt);

struct ViCheckResult {
    double min_pairing = 0.0;        // min over sampled v of <r + b0 u, v - u>_Q
    double max_duality_mismatch = 0.0;  // adjoint-form vs linearized-form relative gap
    double gradient_norm = 0.0;      // ||r + b0 u||_{L2(Q)}
    double max_direction_norm = 0.0; // max over sampled v of ||v - u||_{L2(Q)}
};

/// Samples v at randomized box vertices plus the global bounds, evaluates
/// <r + b0 u, v - u>_Q, and cross-checks each pairing against the
/// linearized-form first-order condition (duality identity).
ViCheckResult variational_inequality_check(const ControlTrajectory& u,
                                           const ControlProblem& problem, int n_samples,
                                           unsigned long long seed);

struct OptimizerOptions {
    int max_iters = 200;
    double tol_stat = 1e-10;
    double initial_step = 1.0;
    double backtrack_factor = 0.5;
    double armijo_c = 1e-4;
    int max_backtracks = 40;
};

enum class Termination { converged, max_iters, line_search_failure };

struct OptimizationResult {
    ControlTrajectory u_opt;
    std::vector<double> cost_history;          // J at each accepted iterate
    std::vector<double> stationarity_history;  // projection residual per iterate
    Termination termination = Termination::max_iters;
    int iterations = 0;
    bool degenerate_b0 = false;  // b0 = 0: gradient is r alone
};

/// Projected gradient descent with Armijo backtracking on the projected step.
OptimizationResult projected_gradient_descent(const ControlTrajectory& u0,
                                              const ControlProblem& problem,
                                              const OptimizerOptions& opts = {});

const char* to_string(Termination t);

}  // namespace choc
