#pragma once

#include <vector>

#include "choc/cost.hpp"
#include "choc/model.hpp"

namespace choc {

/// Test-only defect injection for mutation-sensitivity checks. All flags off
/// in production paths.
struct FaultInjection {
    bool flip_adjoint_b3_sign = false;   // flips the b3 source in solve_adjoint
    bool drop_fpp_in_residual = false;   // drops the F'' term in adjoint_pde_residual
};

/// Continuous-form terminal conditions and the discrete source the transposed
/// recursion applies (both recorded; they agree exactly, see terminal_conditions).
struct TerminalRecord {
    Field q_T, p_T, r_T;            // continuous-form triple
    Field source_mu, source_phi, source_sigma;  // dt * B^T (p,q,r)_T, the applied discrete source
};

/// Adjoint states at time nodes 0..nt. Node nt carries the continuous-form
/// terminal conditions; nodes 0..nt-1 carry the transposed-recursion values.
/// The pairing with a control interval n uses node n-1.
struct AdjointTrajectory {
    std::vector<Field> q, p, r;
    TerminalRecord terminal;

    int nt() const { return static_cast<int>(q.size()) - 1; }
    /// Adjoint r paired with control interval n (n in 1..nt).
    const Field& r_for_interval(int n) const { return r[static_cast<std::size_t>(n - 1)]; }
};

/// Continuous-form terminal triple:
///   p_T = (b6/alpha)(mu(T) - mu_Omega)      (zero when b6 = 0)
///   q_T = -(1/beta)(b2(phi(T) - phi_Omega) - p_T)
///   r_T = b4(sigma(T) - sigma_Omega)
/// Requires alpha > 0 and beta > 0.
TerminalRecord terminal_conditions(const StateTriple& final_state, const CostSpec& cost,
                                   const ModelParams& params);

/// Backward sweep that is the exact transpose of the discrete linearized
/// solve: J_{m+1}^T y_m = c_{m+1} + B^T y_{m+1}, seeded with the
/// continuous-form terminal triple (which reproduces the transposed terminal
/// cost source exactly).
AdjointTrajectory solve_adjoint(const Trajectory& base, const CostSpec& cost,
                                const ModelParams& params, const FaultInjection& fault = {});

struct AdjointPdeResiduals {
    double q_equation = 0.0;  // max over interior nodes of the L2 residual
    double p_equation = 0.0;
    double r_equation = 0.0;
    double combined = 0.0;
};

/// Consistency of the transposed recursion with the continuous adjoint PDE:
/// evaluates the three equations at interior time nodes with one-sided time
/// differences and the discrete Laplacian. Decays first order in dt.
AdjointPdeResiduals adjoint_pde_residual(const AdjointTrajectory& adj, const Trajectory& base,
                                         const CostSpec& cost, const ModelParams& params,
                                         const FaultInjection& fault = {});

}  // namespace choc
