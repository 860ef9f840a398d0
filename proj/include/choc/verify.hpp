#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "choc/adjoint.hpp"
#include "choc/cost.hpp"
#include "choc/optimize.hpp"

namespace choc {

struct CheckReport {
    std::string name;
    std::string inputs;
    std::vector<std::pair<std::string, double>> measured;
    double tolerance = 0.0;
    bool pass = false;
    double runtime_seconds = 0.0;
};

/// One check per line: name, pass, tol, runtime, then measured key=value pairs.
std::string to_line(const CheckReport& r);

/// Least-squares slope of log10(y) against log10(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

struct DualityResult {
    double lhs = 0.0;           // sum_n dt <r, h>_n
    double rhs = 0.0;           // tracking pairings with (eta, theta, rho)
    double rel_residual = 0.0;
};

/// Discrete form of the identity int_Q r h = sum of tracking pairings.
/// Exact up to linear-solver tolerance by the transpose construction.
DualityResult duality_check(const ControlTrajectory& u, const ControlTrajectory& h,
                            const ControlProblem& problem, const FaultInjection& fault = {});

struct GradientCheckResult {
    double rel_error = 0.0;  // at eps = 1e-4
    double slope = 0.0;      // over eps in {1e-3, 1e-4, 1e-5}
    double directional = 0.0;
    std::array<double, 3> rel_errors{};  // per eps level
};

/// Central-difference check of the reduced gradient in direction h.
GradientCheckResult gradient_check(const ControlTrajectory& u, const ControlTrajectory& h,
                                   const ControlProblem& problem,
                                   const FaultInjection& fault = {});

struct FrechetOrderResult {
    std::array<double, 3> h_norms{};
    std::array<double, 3> remainder_norms{};
    double slope = 0.0;
    double fitted_constant_ratio = 0.0;  // c(level2) / c(level1), c = rem / ||h||^2
};

/// Remainder-norm decay over ||h|| in {1e-1, 1e-2, 1e-3} * h0.
FrechetOrderResult frechet_order_check(const ControlTrajectory& u, const ControlTrajectory& h0,
                                       const StateTriple& initial, const ModelParams& params);

struct LipschitzRatios {
    double num_combined_dual = 0.0;  // dual-norm combination plus mixed state norms
    double num_improved = 0.0;       // improved mu and phi norms
    double num_sigma = 0.0;          // sigma components alone
    double control_distance = 0.0;   // ||u1 - u2||_{L2(Q)}
    double combined_dual = 0.0;      // numerators divided by the control distance
    double improved = 0.0;
    double sigma_only = 0.0;
};

struct LipschitzCheckResult {
    LipschitzRatios full;
    LipschitzRatios half;  // for (u1, (u1+u2)/2)
};

/// Continuous-dependence ratios for (u1, u2) and the halved perturbation.
LipschitzCheckResult lipschitz_check(const ControlTrajectory& u1, const ControlTrajectory& u2,
                                     const StateTriple& initial, const ModelParams& params);

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// RK4 integration of the 0-D reduction of the state system for spatially
/// constant data: alpha mu' + phi' = P(phi)(sigma - mu), mu = beta phi' + F'(phi),
/// sigma' = -P(phi)(sigma - mu) + u. Control is piecewise constant per
/// interval; each interval is integrated with `substeps` RK4 steps. Returns
/// (mu, phi, sigma) at nodes 0..nt.
std::vector<std::array<double, 3>> ode_oracle(const ModelParams& params,
                                              std::array<double, 3> initial,
                                              std::span<const double> u_per_interval,
                                              int substeps = 100);

/// Scalar implicit-Euler heat solve d_t y - Lap y = u, Neumann, y(0) = y0.
/// Independent code path used as the decoupling oracle for P == 0.
std::vector<Field> heat_oracle(const Field& y0, const ControlTrajectory& u, double dt);

// ---------------------------------------------------------------------------
// Scenario builders and the full suite
// ---------------------------------------------------------------------------

/// Desk-scale default: 1D, 64 cells, L = 1, T = 0.25, nt = 50, logarithmic
/// potential k = 2, sigmoid P(1, 2), alpha = beta = 0.5, box [-1, 1],
/// phi0 = 0.3 cos(pi x), mu0 = 0, sigma0 = 0.5.
ControlProblem desk_problem();

/// Same scenario with the extended cost (b5, b6 > 0 and mu targets).
ControlProblem desk_problem_extended_cost();

struct ManufacturedSetup {
    ControlProblem problem;   // b0 = 0, targets generated from u_dagger
    ControlTrajectory u_dagger;
};

/// Targets generated from a known interior control, so J(u_dagger) = 0.
ManufacturedSetup manufactured_problem();

/// Executes the full battery (gradient, duality, Frechet order, linearity,
/// mass ledger, separation, Lipschitz, ODE oracle, adjoint PDE consistency,
/// mutation sensitivity). Deterministic under the seed. Failures are
/// collected in the reports, never thrown.
std::vector<CheckReport> run_all_checks(const ControlProblem& problem,
                                        unsigned long long seed);

}  // namespace choc
