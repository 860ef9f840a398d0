#include "choc/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "choc/rng.hpp"
#include "choc/sensitivity.hpp"
#include "choc/state_solver.hpp"

namespace choc {

double reduced_cost(const ControlTrajectory& u, const ControlProblem& problem) {
    const Trajectory traj = solve_state(problem.initial, u, problem.params);
    return evaluate_cost(traj, u, problem.cost).total;
}

ControlTrajectory reduced_gradient(const ControlTrajectory& u, const ControlProblem& problem,
                                   const FaultInjection& fault) {
    const Trajectory traj = solve_state(problem.initial, u, problem.params);
    const AdjointTrajectory adj = solve_adjoint(traj, problem.cost, problem.params, fault);
    ControlTrajectory g = u;
    for (int n = 1; n <= u.nt(); ++n) {
        Field& gn = g.at(n);
        const auto rv = adj.r_for_interval(n).values();
        auto gv = gn.values();
        for (std::size_t i = 0; i < gv.size(); ++i)
            gv[i] = rv[i] + problem.cost.b0 * gv[i];
    }
    return g;
}

ControlTrajectory project_box(const ControlTrajectory& u, const ControlBox& box) {
    ControlTrajectory out = u;
    const auto lo = box.lower.values();
    const auto hi = box.upper.values();
    for (auto& f : out.fields()) {
        auto v = f.values();
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
    }
    return out;
}

double stationarity_residual(const ControlTrajectory& u, const ControlTrajectory& g,
                             const ControlBox& box, double dt) {
    const ControlTrajectory proj = project_box(u - g, box);
    return l2q_norm(u - proj, dt);
}

ViCheckResult variational_inequality_check(const ControlTrajectory& u,
                                           const ControlProblem& problem, int n_samples,
                                           unsigned long long seed) {
    const double dt = problem.params.dt();
    const Trajectory base = solve_state(problem.initial, u, problem.params);
    const AdjointTrajectory adj = solve_adjoint(base, problem.cost, problem.params);
    const CostSpec& c = problem.cost;

    ControlTrajectory g = u;
    for (int n = 1; n <= u.nt(); ++n) {
        auto gv = g.at(n).values();
        const auto rv = adj.r_for_interval(n).values();
        for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = rv[i] + c.b0 * gv[i];
    }

    // Sampled test points: randomized vertex controls plus the two global bounds.
    Rng rng(seed);
    std::vector<ControlTrajectory> vs;
    for (int s = 0; s < n_samples; ++s) {
        ControlTrajectory v = u;
        for (auto& f : v.fields()) {
            auto fv = f.values();
            const auto lo = problem.box.lower.values();
            const auto hi = problem.box.upper.values();
            for (std::size_t i = 0; i < fv.size(); ++i) fv[i] = rng.coin() ? hi[i] : lo[i];
        }
        vs.push_back(std::move(v));
    }
    {
        ControlTrajectory v_lo = u, v_hi = u;
        for (auto& f : v_lo.fields()) f = problem.box.lower;
        for (auto& f : v_hi.fields()) f = problem.box.upper;
        vs.push_back(std::move(v_lo));
        vs.push_back(std::move(v_hi));
    }

    ViCheckResult out;
    out.gradient_norm = l2q_norm(g, dt);
    out.min_pairing = std::numeric_limits<double>::infinity();
    const double floor = 1e-14 * std::max(1.0, out.gradient_norm);

    for (const auto& v : vs) {
        const ControlTrajectory d = v - u;
        out.max_direction_norm = std::max(out.max_direction_norm, l2q_norm(d, dt));
        const double adjoint_form = inner_q(g, d, dt);
        out.min_pairing = std::min(out.min_pairing, adjoint_form);

        // Linearized form of the same pairing (first-order condition written
        // with sensitivities): tracking pairings with (eta, theta, rho) at
        // h = v - u, plus b0 <u, v-u>.
        const LinearizedTrajectory lin = solve_linearized(base, d, problem.params);
        double lin_form = c.b0 != 0.0 ? c.b0 * inner_q(u, d, dt) : 0.0;
        for (int n = 1; n <= base.nt(); ++n) {
            const StateTriple& s = base.at(n);
            if (c.b1 != 0.0)
                lin_form += dt * c.b1 * inner(misfit(s.phi, c.phi_q, n), lin.theta[n]);
            if (c.b3 != 0.0)
                lin_form += dt * c.b3 * inner(misfit(s.sigma, c.sigma_q, n), lin.rho[n]);
            if (c.b5 != 0.0)
                lin_form += dt * c.b5 * inner(misfit(s.mu, c.mu_q, n), lin.eta[n]);
        }
        const StateTriple& fin = base.final();
        const int nt = base.nt();
        if (c.b2 != 0.0)
            lin_form += c.b2 * inner(misfit_terminal(fin.phi, c.phi_omega), lin.theta[nt]);
        if (c.b4 != 0.0)
            lin_form += c.b4 * inner(misfit_terminal(fin.sigma, c.sigma_omega), lin.rho[nt]);
        if (c.b6 != 0.0)
            lin_form += c.b6 * inner(misfit_terminal(fin.mu, c.mu_omega), lin.eta[nt]);

        const double mismatch =
            std::abs(adjoint_form - lin_form) /
            std::max({std::abs(adjoint_form), std::abs(lin_form), floor});
        out.max_duality_mismatch = std::max(out.max_duality_mismatch, mismatch);
    }
    return out;
}

OptimizationResult projected_gradient_descent(const ControlTrajectory& u0,
                                              const ControlProblem& problem,
                                              const OptimizerOptions& opts) {
    const double dt = problem.params.dt();
    OptimizationResult res;
    res.degenerate_b0 = problem.cost.b0 == 0.0;

    ControlTrajectory u = project_box(u0, problem.box);
    double J = reduced_cost(u, problem);
    ControlTrajectory g = reduced_gradient(u, problem);
    res.cost_history.push_back(J);

    for (int it = 0; it < opts.max_iters; ++it) {
        const double stat = stationarity_residual(u, g, problem.box, dt);
        res.stationarity_history.push_back(stat);
        if (stat <= opts.tol_stat) {
            res.termination = Termination::converged;
            res.u_opt = std::move(u);
            res.iterations = it;
            return res;
        }

        double s = opts.initial_step;
        bool accepted = false;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
            const ControlTrajectory u_new = project_box(u - s * g, problem.box);
            const ControlTrajectory d = u_new - u;
            const double step_sq = inner_q(d, d, dt);
            if (step_sq == 0.0) break;  // projection swallowed the step entirely
            const double J_new = reduced_cost(u_new, problem);
            if (J_new <= J - opts.armijo_c * step_sq / s) {
                u = u_new;
                J = J_new;
                accepted = true;
                break;
            }
            s *= opts.backtrack_factor;
        }
        if (!accepted) {
            res.termination = Termination::line_search_failure;
            res.u_opt = std::move(u);
            res.iterations = it;
            return res;
        }
        res.cost_history.push_back(J);
        g = reduced_gradient(u, problem);
    }

    res.stationarity_history.push_back(stationarity_residual(u, g, problem.box, dt));
    res.termination = Termination::max_iters;
    res.u_opt = std::move(u);
    res.iterations = opts.max_iters;
    return res;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::max_iters: return "max_iters";
        case Termination::line_search_failure: return "line_search_failure";
    }
    return "unknown";
}

}  // namespace choc
