#include "choc/state_solver.hpp"

#include <cmath>
#include <limits>

#include "choc/linear_ops.hpp"

namespace choc {

bool HypothesesReport::all_ok() const {
    for (const auto& c : checks)
        if (!c.ok) return false;
    return true;
}

std::string HypothesesReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.ok) return c.name + ": " + c.detail;
    return {};
}

HypothesesReport check_hypotheses(const ControlProblem& problem) {
    HypothesesReport rep;
    const ModelParams& p = problem.params;
    const CostSpec& c = problem.cost;

    auto add = [&rep](const std::string& name, bool ok, const std::string& detail) {
        rep.checks.push_back({name, ok, detail});
    };

    // H1: weights nonnegative, not all zero.
    {
        const bool nonneg = c.b0 >= 0 && c.b1 >= 0 && c.b2 >= 0 && c.b3 >= 0 && c.b4 >= 0 &&
                            c.b5 >= 0 && c.b6 >= 0;
        if (!nonneg)
            add("H1", false, "cost weights must be nonnegative");
        else if (c.all_weights_zero())
            add("H1", false, "cost weights must not all be zero");
        else
            add("H1", true, "");
    }

    // H2: targets finite, u_* <= u^* everywhere.
    {
        bool ok = true;
        std::string detail;
        auto check_target = [&](const TimeTarget& t, const char* name) {
            if (t.empty()) return;
            if (!t.at(0).all_finite()) {
                ok = false;
                detail = std::string(name) + " has non-finite values";
            }
        };
        check_target(c.phi_q, "phi_q");
        check_target(c.sigma_q, "sigma_q");
        check_target(c.mu_q, "mu_q");
        for (const auto* t : {&c.phi_omega, &c.sigma_omega, &c.mu_omega})
            if (*t && !(*t)->all_finite()) {
                ok = false;
                detail = "a terminal target has non-finite values";
            }
        const auto lo = problem.box.lower.values();
        const auto hi = problem.box.upper.values();
        for (std::size_t i = 0; i < lo.size() && ok; ++i) {
            if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
                ok = false;
                detail = "control bounds must be finite";
            } else if (lo[i] > hi[i]) {
                ok = false;
                detail = "u_* > u^* at cell " + std::to_string(i);
            }
        }
        add("H2", ok, detail);
    }

    // H3: alpha, beta > 0.
    add("H3", p.alpha > 0.0 && p.beta > 0.0,
        p.alpha > 0.0 && p.beta > 0.0
            ? ""
            : "alpha and beta must be > 0 (alpha = " + std::to_string(p.alpha) +
                  ", beta = " + std::to_string(p.beta) + ")");

    // H4: initial fields finite.
    add("H4",
        problem.initial.mu.all_finite() && problem.initial.phi.all_finite() &&
            problem.initial.sigma.all_finite(),
        "initial data must be finite");

    // H9: r_minus < inf phi0 <= sup phi0 < r_plus, with the measured margin.
    {
        const double lo = min_value(problem.initial.phi);
        const double hi = max_value(problem.initial.phi);
        const double m =
            std::min(lo - p.potential.r_minus(), p.potential.r_plus() - hi);
        rep.h9_margin = m;
        add("H9", m > 0.0,
            m > 0.0 ? "" : "phi0 range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                               "] leaves the potential domain");
    }

    // H10: report ||(1/beta)(mu0 + Lap phi0 - B(phi0) - pi(phi0))||; not a gate.
    {
        double norm = std::numeric_limits<double>::quiet_NaN();
        if (rep.h9_margin > 0.0 && p.beta > 0.0) {
            Field g = laplacian(problem.initial.phi);
            auto gv = g.values();
            const auto phi = problem.initial.phi.values();
            const auto mu = problem.initial.mu.values();
            for (std::size_t i = 0; i < gv.size(); ++i) {
                const PotentialSplit s = p.potential.split(phi[i]);
                gv[i] = (mu[i] + gv[i] - s.B - s.pi) / p.beta;
            }
            norm = l2_norm(g);
        }
        rep.h10_norm = norm;
    }

    return rep;
}

HypothesesReport validate_hypotheses(const ControlProblem& problem) {
    HypothesesReport rep = check_hypotheses(problem);
    if (!rep.all_ok()) throw ConfigError("hypothesis violated - " + rep.first_failure());
    return rep;
}

void state_step_residual(const StateTriple& next, const StateTriple& prev, const Field& u_next,
                         const ModelParams& params, std::span<double> out) {
    const Grid& g = next.phi.grid();
    const std::size_t N = g.size();
    const double idt = 1.0 / params.dt();

    const Field lap_mu = laplacian(next.mu);
    const Field lap_phi = laplacian(next.phi);
    const Field lap_sigma = laplacian(next.sigma);

    const auto mu = next.mu.values(), phi = next.phi.values(), sg = next.sigma.values();
    const auto mu0 = prev.mu.values(), phi0 = prev.phi.values(), sg0 = prev.sigma.values();
    const auto lm = lap_mu.values(), lp = lap_phi.values(), ls = lap_sigma.values();
    const auto uv = u_next.values();

    for (std::size_t i = 0; i < N; ++i) {
        const double P = params.prolif.eval(phi[i], 0);
        const double Fp = params.potential.eval_F(phi[i], 1);
        const double exch = P * (sg[i] - mu[i]);
        out[i] = params.alpha * (mu[i] - mu0[i]) * idt + (phi[i] - phi0[i]) * idt - lm[i] - exch;
        out[N + i] = mu[i] - params.beta * (phi[i] - phi0[i]) * idt + lp[i] - Fp;
        out[2 * N + i] = (sg[i] - sg0[i]) * idt - ls[i] + exch - uv[i];
    }
}

namespace {

bool phi_strictly_inside(std::span<const double> phi, const Potential& pot) {
    const double lo = pot.r_minus() + pot.eps_domain();
    const double hi = pot.r_plus() - pot.eps_domain();
    for (double v : phi)
        if (!(v > lo && v < hi)) return false;
    return true;
}

}  // namespace

StateTriple step_state(const StateTriple& prev, const Field& u_next, const ModelParams& params,
                       StepStats* stats) {
    const Grid& g = prev.phi.grid();
    require_same_grid(prev.phi, u_next, "step_state");
    const std::size_t N = g.size();
    const NewtonOptions& no = params.newton;

    if (!phi_strictly_inside(prev.phi.values(), params.potential))
        throw DomainViolation("step_state: previous phi is not strictly inside the potential domain",
                              min_value(prev.phi), params.potential.r_minus());

    StateTriple x = prev;  // initial guess: previous state
    std::vector<double> res(3 * N), delta(3 * N), trial(3 * N), cur(3 * N);

    state_step_residual(x, prev, u_next, params, res);
    double rnorm = stacked_l2(res, g.cell_volume);
    int iters = 0;

    while (rnorm > no.floor && iters < no.max_iter) {
        const StepJacobian J = StepJacobian::at(x, params);
        const auto diag = J.diagonal();
        for (auto& v : res) v = -v;
        bicgstab([&J](std::span<const double> in, std::span<double> out) { J.apply(in, out); },
                 res, delta, diag, params.linear);

        pack3(x.mu, x.phi, x.sigma, cur);
        double damp = 1.0;
        StateTriple cand = x;
        bool interior = false;
        for (int halving = 0; halving <= no.max_halvings; ++halving) {
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = cur[i] + damp * delta[i];
            unpack3(trial, cand.mu, cand.phi, cand.sigma);
            if (phi_strictly_inside(cand.phi.values(), params.potential)) {
                interior = true;
                break;
            }
            damp *= 0.5;
        }
        if (!interior)
            throw DomainViolation(
                "step_state: Newton update leaves the potential domain despite damping",
                max_value(cand.phi), params.potential.r_plus());

        x = cand;
        ++iters;
        state_step_residual(x, prev, u_next, params, res);
        const double rnew = stacked_l2(res, g.cell_volume);
        const bool plateau = rnew >= 0.9 * rnorm;
        rnorm = rnew;
        if (plateau && rnorm <= no.tol) break;  // roundoff plateau inside the contract
    }

    if (rnorm > no.tol)
        throw SolverError("step_state: Newton did not reach tolerance (residual " +
                              std::to_string(rnorm) + ")",
                          rnorm);
    if (stats) {
        stats->newton_iters = iters;
        stats->residual = rnorm;
        stats->phi_min = min_value(x.phi);
        stats->phi_max = max_value(x.phi);
    }
    return x;
}

Trajectory solve_state(const StateTriple& initial, const ControlTrajectory& u,
                       const ModelParams& params) {
    if (u.nt() != params.nt)
        throw ShapeError("solve_state: control has " + std::to_string(u.nt()) +
                         " samples, params.nt = " + std::to_string(params.nt));
    Trajectory traj;
    traj.params = params;
    traj.states.reserve(params.nt + 1);
    traj.step_stats.reserve(params.nt);
    traj.states.push_back(initial);
    for (int n = 1; n <= params.nt; ++n) {
        StepStats st;
        try {
            traj.states.push_back(step_state(traj.states.back(), u.at(n), params, &st));
        } catch (const SolverError& e) {
            throw SolverError("solve_state: step " + std::to_string(n) + " failed: " + e.what(),
                              e.residual, n);
        } catch (const DomainViolation& e) {
            throw DomainViolation(
                "solve_state: step " + std::to_string(n) + " failed: " + e.what(), e.r, e.bound);
        }
        traj.step_stats.push_back(st);
    }
    return traj;
}

std::vector<double> mass_ledger(const Trajectory& traj, const ControlTrajectory& u) {
    const int nt = traj.nt();
    if (u.nt() != nt) throw ShapeError("mass_ledger: control/trajectory length mismatch");
    const double dt = traj.params.dt();
    const double a = traj.params.alpha;
    const Grid& g = traj.at(0).phi.grid();
    const Field one(g, 1.0);

    auto mass = [&](const StateTriple& s) {
        return a * inner(s.mu, one) + inner(s.phi, one) + inner(s.sigma, one);
    };

    std::vector<double> res(nt);
    double prev = mass(traj.at(0));
    for (int n = 1; n <= nt; ++n) {
        const double cur = mass(traj.at(n));
        res[n - 1] = std::abs(cur - prev - dt * inner(u.at(n), one));
        prev = cur;
    }
    return res;
}

SeparationReport separation_report(const Trajectory& traj, const Potential& pot) {
    SeparationReport rep;
    rep.phi_min = std::numeric_limits<double>::infinity();
    rep.phi_max = -std::numeric_limits<double>::infinity();
    for (const auto& s : traj.states) {
        rep.phi_min = std::min(rep.phi_min, min_value(s.phi));
        rep.phi_max = std::max(rep.phi_max, max_value(s.phi));
    }
    rep.margin = std::min(rep.phi_min - pot.r_minus(), pot.r_plus() - rep.phi_max);
    return rep;
}

}  // namespace choc
