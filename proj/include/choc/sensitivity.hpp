#pragma once

#include <vector>

#include "choc/model.hpp"

namespace choc {

/// Solution (eta, theta, rho) of the linearized system around a base
/// trajectory, at time nodes 0..nt. Node 0 is identically zero.
struct LinearizedTrajectory {
    std::vector<Field> eta, theta, rho;

    int nt() const { return static_cast<int>(eta.size()) - 1; }
};

/// Implicit Euler with coefficients frozen at the base's new time level, so
/// each step matrix is exactly the converged forward Newton Jacobian.
LinearizedTrajectory solve_linearized(const Trajectory& base, const ControlTrajectory& h,
                                      const ModelParams& params);

struct RemainderNorms {
    double zeta = 0.0;   // mu remainder
    double psi = 0.0;    // phi remainder
    double chi = 0.0;    // sigma remainder
    double combined = 0.0;
    double h_norm = 0.0;  // ||h||_{L2(Q)}
};

/// Frechet remainder (zeta, psi, chi) = S(u+h) - S(u) - DS(u)h in the
/// trajectory norm max_t ||.||_{L2} + (sum_t dt |.|_{H1}^2)^{1/2}.
RemainderNorms frechet_remainder(const ControlTrajectory& u, const ControlTrajectory& h,
                                 const StateTriple& initial, const ModelParams& params);

/// max-over-time L2 plus time-summed H1-seminorm of a node-indexed field list.
double trajectory_norm(const std::vector<Field>& fields, double dt);

}  // namespace choc
