#include "choc/adjoint.hpp"

#include <cmath>

#include "choc/linear_ops.hpp"

namespace choc {

TerminalRecord terminal_conditions(const StateTriple& final_state, const CostSpec& cost,
                                   const ModelParams& params) {
    if (!(params.beta > 0.0))
        throw ConfigError("terminal_conditions: beta = 0 is unsupported");
    if (!(params.alpha > 0.0))
        throw ConfigError("terminal_conditions: alpha = 0 is unsupported");

    const Grid& g = final_state.phi.grid();
    TerminalRecord rec{Field(g, 0.0), Field(g, 0.0), Field(g, 0.0),
                       Field(g, 0.0), Field(g, 0.0), Field(g, 0.0)};

    if (cost.b6 != 0.0)
        rec.p_T = (cost.b6 / params.alpha) * misfit_terminal(final_state.mu, cost.mu_omega);
    if (cost.b2 != 0.0 || cost.b6 != 0.0) {
        Field rhs = cost.b2 != 0.0
                        ? cost.b2 * misfit_terminal(final_state.phi, cost.phi_omega)
                        : Field(g, 0.0);
        rhs -= rec.p_T;
        rec.q_T = (-1.0 / params.beta) * rhs;
    }
    if (cost.b4 != 0.0)
        rec.r_T = cost.b4 * misfit_terminal(final_state.sigma, cost.sigma_omega);

    // The discrete source the transposed recursion applies at the last step is
    // dt * B^T (p,q,r)_T; by construction it equals the terminal cost gradient
    // (alpha p_T, p_T - beta q_T, r_T).
    rec.source_mu = params.alpha * rec.p_T;
    rec.source_phi = rec.p_T - params.beta * rec.q_T;
    rec.source_sigma = rec.r_T;
    return rec;
}

AdjointTrajectory solve_adjoint(const Trajectory& base, const CostSpec& cost,
                                const ModelParams& params, const FaultInjection& fault) {
    const int nt = base.nt();
    const Grid& g = base.at(0).phi.grid();
    const std::size_t N = g.size();
    const double idt = 1.0 / params.dt();
    const double b3_sign = fault.flip_adjoint_b3_sign ? -1.0 : 1.0;

    AdjointTrajectory adj;
    adj.p.assign(nt + 1, Field(g, 0.0));
    adj.q.assign(nt + 1, Field(g, 0.0));
    adj.r.assign(nt + 1, Field(g, 0.0));
    adj.terminal = terminal_conditions(base.final(), cost, params);
    adj.p[nt] = adj.terminal.p_T;
    adj.q[nt] = adj.terminal.q_T;
    adj.r[nt] = adj.terminal.r_T;

    std::vector<double> rhs(3 * N), y(3 * N);
    for (int m = nt - 1; m >= 0; --m) {
        const StateTriple& pt = base.at(m + 1);
        const StepJacobian J = StepJacobian::at(pt, params);

        // c_{m+1}: tracking sources in state-component order (mu, phi, sigma).
        Field c_mu = cost.b5 != 0.0 ? cost.b5 * misfit(pt.mu, cost.mu_q, m + 1) : Field(g, 0.0);
        Field c_phi = cost.b1 != 0.0 ? cost.b1 * misfit(pt.phi, cost.phi_q, m + 1) : Field(g, 0.0);
        Field c_sigma =
            cost.b3 != 0.0 ? (b3_sign * cost.b3) * misfit(pt.sigma, cost.sigma_q, m + 1)
                           : Field(g, 0.0);

        const auto pn = adj.p[m + 1].values();
        const auto qn = adj.q[m + 1].values();
        const auto rn = adj.r[m + 1].values();
        const auto cm = c_mu.values(), cp = c_phi.values(), cs = c_sigma.values();
        for (std::size_t i = 0; i < N; ++i) {
            rhs[i] = cm[i] + params.alpha * idt * pn[i];
            rhs[N + i] = cp[i] + idt * pn[i] - params.beta * idt * qn[i];
            rhs[2 * N + i] = cs[i] + idt * rn[i];
        }

        const auto diag = J.diagonal();
        try {
            bicgstab(
                [&J](std::span<const double> in, std::span<double> out) {
                    J.apply_transpose(in, out);
                },
                rhs, y, diag, params.linear);
        } catch (const SolverError& e) {
            throw SolverError("solve_adjoint: step " + std::to_string(m) + ": " + e.what(),
                              e.residual, m);
        }
        unpack3(y, adj.p[m], adj.q[m], adj.r[m]);
    }
    return adj;
}

AdjointPdeResiduals adjoint_pde_residual(const AdjointTrajectory& adj, const Trajectory& base,
                                         const CostSpec& cost, const ModelParams& params,
                                         const FaultInjection& fault) {
    const int nt = base.nt();
    const Grid& g = base.at(0).phi.grid();
    const std::size_t N = g.size();
    const double idt = 1.0 / params.dt();

    AdjointPdeResiduals out;
    for (int m = 1; m + 1 <= nt; ++m) {
        const StateTriple& s = base.at(m);
        const Field lap_q = laplacian(adj.q[m]);
        const Field lap_p = laplacian(adj.p[m]);
        const Field lap_r = laplacian(adj.r[m]);
        Field eq(g, 0.0), ep(g, 0.0), er(g, 0.0);

        const Field mis_phi = cost.b1 != 0.0 ? misfit(s.phi, cost.phi_q, m) : Field(g, 0.0);
        const Field mis_sig = cost.b3 != 0.0 ? misfit(s.sigma, cost.sigma_q, m) : Field(g, 0.0);
        const Field mis_mu = cost.b5 != 0.0 ? misfit(s.mu, cost.mu_q, m) : Field(g, 0.0);

        const auto qv = adj.q[m].values(), pv = adj.p[m].values(), rv = adj.r[m].values();
        const auto qn = adj.q[m + 1].values(), pn = adj.p[m + 1].values(),
                   rn = adj.r[m + 1].values();
        const auto lq = lap_q.values(), lp = lap_p.values(), lr = lap_r.values();
        const auto phi = s.phi.values(), mu = s.mu.values(), sg = s.sigma.values();
        auto eqv = eq.values(), epv = ep.values(), erv = er.values();
        const auto mphi = mis_phi.values(), msig = mis_sig.values(), mmu = mis_mu.values();

        for (std::size_t i = 0; i < N; ++i) {
            const double P = params.prolif.eval(phi[i], 0);
            const double Pp = params.prolif.eval(phi[i], 1) * (sg[i] - mu[i]);
            const double Fpp = fault.drop_fpp_in_residual
                                   ? 0.0
                                   : params.potential.eval_F(phi[i], 2);
            const double dtq = (qn[i] - qv[i]) * idt;
            const double dtp = (pn[i] - pv[i]) * idt;
            const double dtr = (rn[i] - rv[i]) * idt;
            eqv[i] = params.beta * dtq - dtp + lq[i] - Fpp * qv[i] + Pp * (rv[i] - pv[i]) -
                     cost.b1 * mphi[i];
            epv[i] = qv[i] - params.alpha * dtp - lp[i] + P * (pv[i] - rv[i]) -
                     cost.b5 * mmu[i];
            erv[i] = -dtr - lr[i] + P * (rv[i] - pv[i]) - cost.b3 * msig[i];
        }
        out.q_equation = std::max(out.q_equation, l2_norm(eq));
        out.p_equation = std::max(out.p_equation, l2_norm(ep));
        out.r_equation = std::max(out.r_equation, l2_norm(er));
    }
    out.combined = std::sqrt(out.q_equation * out.q_equation + out.p_equation * out.p_equation +
                             out.r_equation * out.r_equation);
    return out;
}

}  // namespace choc
