#pragma once

#include <functional>
#include <span>
#include <vector>

#include "choc/model.hpp"

namespace choc {

/// Newton Jacobian of one implicit Euler step of the state system, with
/// coefficients frozen at a (mu, phi, sigma) linearization point. The same
/// operator drives the forward Newton correction, the linearized step, and
/// (transposed) the adjoint step. Stacked layout: [mu | phi | sigma].
///
/// Blocks (pointwise fields pbar = P(phi), psm = P'(phi)(sigma - mu),
/// fpp = F''(phi)):
///
///   [ a/dt - Lap + pbar   1/dt - psm          -pbar          ]
///   [ I                   -b/dt + Lap - fpp    0             ]
///   [ -pbar               psm                  1/dt - Lap + pbar ]
struct StepJacobian {
    Grid grid;
    double alpha = 0.0, beta = 0.0, dt = 0.0;
    Field pbar, psm, fpp;

    static StepJacobian at(const StateTriple& point, const ModelParams& p);

    std::size_t n() const { return grid.size(); }
    std::size_t stacked_size() const { return 3 * n(); }

    void apply(std::span<const double> x, std::span<double> y) const;
    void apply_transpose(std::span<const double> x, std::span<double> y) const;
    /// Diagonal (shared by the operator and its transpose), for Jacobi scaling.
    std::vector<double> diagonal() const;
};

struct KrylovResult {
    int iterations = 0;
    double rel_residual = 0.0;
};

/// Preconditioned BiCGStab for the (nonsymmetric) stacked step systems.
/// `diag` supplies the Jacobi preconditioner. Throws SolverError on
/// breakdown or non-convergence.
KrylovResult bicgstab(const std::function<void(std::span<const double>, std::span<double>)>& op,
                      std::span<const double> rhs, std::span<double> x,
                      std::span<const double> diag, const LinearSolverOptions& opts);

// Stacked-vector helpers.
void pack3(const Field& a, const Field& b, const Field& c, std::span<double> out);
void unpack3(std::span<const double> in, Field& a, Field& b, Field& c);
double stacked_l2(std::span<const double> x, double cell_volume);

}  // namespace choc
