#include "choc/sensitivity.hpp"

#include <cmath>

#include "choc/linear_ops.hpp"
#include "choc/state_solver.hpp"

namespace choc {

LinearizedTrajectory solve_linearized(const Trajectory& base, const ControlTrajectory& h,
                                      const ModelParams& params) {
    const int nt = base.nt();
    if (h.nt() != nt) throw ShapeError("solve_linearized: direction/trajectory length mismatch");
    const Grid& g = base.at(0).phi.grid();
    const std::size_t N = g.size();
    const double idt = 1.0 / params.dt();

    LinearizedTrajectory lin;
    lin.eta.assign(nt + 1, Field(g, 0.0));
    lin.theta.assign(nt + 1, Field(g, 0.0));
    lin.rho.assign(nt + 1, Field(g, 0.0));

    std::vector<double> rhs(3 * N), x(3 * N);
    for (int n = 1; n <= nt; ++n) {
        const StepJacobian J = StepJacobian::at(base.at(n), params);

        // rhs = B * x_{n-1} + (0, 0, h_n)
        const auto ep = lin.eta[n - 1].values();
        const auto tp = lin.theta[n - 1].values();
        const auto rp = lin.rho[n - 1].values();
        const auto hv = h.at(n).values();
        for (std::size_t i = 0; i < N; ++i) {
            rhs[i] = params.alpha * idt * ep[i] + idt * tp[i];
            rhs[N + i] = -params.beta * idt * tp[i];
            rhs[2 * N + i] = idt * rp[i] + hv[i];
        }

        const auto diag = J.diagonal();
        try {
            bicgstab([&J](std::span<const double> in, std::span<double> out) { J.apply(in, out); },
                     rhs, x, diag, params.linear);
        } catch (const SolverError& e) {
            throw SolverError("solve_linearized: step " + std::to_string(n) + ": " + e.what(),
                              e.residual, n);
        }
        unpack3(x, lin.eta[n], lin.theta[n], lin.rho[n]);
    }
    return lin;
}

double trajectory_norm(const std::vector<Field>& fields, double dt) {
    double max_l2 = 0.0, grad_acc = 0.0;
    for (std::size_t n = 0; n < fields.size(); ++n) {
        max_l2 = std::max(max_l2, l2_norm(fields[n]));
        if (n >= 1) grad_acc += dt * h1_seminorm_sq(fields[n]);
    }
    return max_l2 + std::sqrt(grad_acc);
}

RemainderNorms frechet_remainder(const ControlTrajectory& u, const ControlTrajectory& h,
                                 const StateTriple& initial, const ModelParams& params) {
    const Trajectory base = solve_state(initial, u, params);
    const Trajectory bumped = solve_state(initial, u + h, params);
    const LinearizedTrajectory lin = solve_linearized(base, h, params);

    const int nt = base.nt();
    std::vector<Field> zeta, psi, chi;
    zeta.reserve(nt + 1);
    psi.reserve(nt + 1);
    chi.reserve(nt + 1);
    for (int n = 0; n <= nt; ++n) {
        zeta.push_back(bumped.at(n).mu - base.at(n).mu - lin.eta[n]);
        psi.push_back(bumped.at(n).phi - base.at(n).phi - lin.theta[n]);
        chi.push_back(bumped.at(n).sigma - base.at(n).sigma - lin.rho[n]);
    }

    RemainderNorms out;
    const double dt = params.dt();
    out.zeta = trajectory_norm(zeta, dt);
    out.psi = trajectory_norm(psi, dt);
    out.chi = trajectory_norm(chi, dt);
    out.combined = std::sqrt(out.zeta * out.zeta + out.psi * out.psi + out.chi * out.chi);
    out.h_norm = l2q_norm(h, dt);
    return out;
}

}  // namespace choc
