// Acceptance suite: one binary, one pass/fail line per criterion, exit code
// equal to the number of failures. Desk scale throughout: 1D, 64 cells,
// L = 1, T = 0.25, nt = 50 (dt = 5e-3), logarithmic potential k = 2,
// sigmoid P(1, 2), alpha = beta = 0.5, control box [-1, 1].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "choc/optimize.hpp"
#include "choc/rng.hpp"
#include "choc/sensitivity.hpp"
#include "choc/state_solver.hpp"
#include "choc/verify.hpp"

using namespace choc;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(int id, const char* name, bool pass, const std::string& detail, double runtime_s) {
    if (!pass) ++g_failures;
    std::printf("criterion %02d [%s] %-24s %s (%.1f s)\n", id, pass ? "PASS" : "FAIL", name,
                detail.c_str(), runtime_s);
    std::fflush(stdout);
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return std::string(buf);
}

ControlTrajectory admissible(const ControlProblem& p, Rng& rng, double amp) {
    return project_box(random_smooth_control(p.grid(), p.params.nt, rng, amp), p.box);
}

// Criterion 1 (and the extended-cost variant inside criterion 10): central
// difference gradient check on seeded pairs; rel error <= 1e-6 at eps = 1e-4
// and error-vs-eps slope in [1.8, 2.2].
struct GradientBatch {
    double max_rel = 0.0;
    double min_slope = 1e9, max_slope = -1e9;
};

GradientBatch gradient_batch(const ControlProblem& p, unsigned long long seed, int pairs) {
    GradientBatch b;
    Rng rng(seed);
    for (int k = 0; k < pairs; ++k) {
        const ControlTrajectory u = admissible(p, rng, 0.45);
        const ControlTrajectory h = random_smooth_control(p.grid(), p.params.nt, rng, 32.0);
        const GradientCheckResult r = gradient_check(u, h, p);
        b.max_rel = std::max(b.max_rel, r.rel_error);
        b.min_slope = std::min(b.min_slope, r.slope);
        b.max_slope = std::max(b.max_slope, r.slope);
    }
    return b;
}

}  // namespace

int main() {
    const ControlProblem desk = desk_problem();
    const unsigned long long seed = 42;

    // 1. Gradient check (reduced gradient r + b0 u vs central differences).
    {
        Timer t;
        const GradientBatch b = gradient_batch(desk, seed, 5);
        const bool pass = b.max_rel <= 1e-6 && b.min_slope >= 1.8 && b.max_slope <= 2.2 &&
                          t.seconds() <= 120.0;
        report(1, "gradient_check", pass,
               fmt("max_rel=%.2e (tol 1e-6), slopes=[%.3f, %.3f] in [1.8, 2.2]", b.max_rel,
                   b.min_slope, b.max_slope),
               t.seconds());
    }

    // 2. Duality identity, 5 seeded pairs, relative residual <= 1e-9.
    {
        Timer t;
        Rng rng(seed + 1);
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const ControlTrajectory u = admissible(desk, rng, 0.45);
            const ControlTrajectory h =
                random_smooth_control(desk.grid(), desk.params.nt, rng, 1.0);
            worst = std::max(worst, duality_check(u, h, desk).rel_residual);
        }
        const bool pass = worst <= 1e-9 && t.seconds() <= 60.0;
        report(2, "duality_identity", pass, fmt("max_rel_residual=%.2e (tol 1e-9)", worst),
               t.seconds());
    }

    // 3. Frechet order: remainder slope over ||h|| in {1e-1,1e-2,1e-3}*h0.
    {
        Timer t;
        Rng rng(seed + 2);
        const ControlTrajectory u = admissible(desk, rng, 0.4);
        const ControlTrajectory h0 =
            random_smooth_control(desk.grid(), desk.params.nt, rng, 0.5);
        const FrechetOrderResult r = frechet_order_check(u, h0, desk.initial, desk.params);
        const bool pass = r.slope >= 1.8 && r.slope <= 2.2 && t.seconds() <= 180.0;
        report(3, "frechet_order", pass,
               fmt("slope=%.3f in [1.8, 2.2], remainders %.2e -> %.2e", r.slope,
                   r.remainder_norms[0], r.remainder_norms[2]),
               t.seconds());
    }

    // 4. Linearized well-posedness proxies: exact zero at h = 0; superposition
    //    and scaling to 1e-10.
    {
        Timer t;
        Rng rng(seed + 3);
        const ControlTrajectory u = admissible(desk, rng, 0.4);
        const Trajectory base = solve_state(desk.initial, u, desk.params);
        const ControlTrajectory zero(desk.grid(), desk.params.nt, 0.0);
        const LinearizedTrajectory lz = solve_linearized(base, zero, desk.params);
        double zero_norm = 0.0;
        for (int n = 0; n <= lz.nt(); ++n)
            zero_norm = std::max(
                {zero_norm, l2_norm(lz.eta[n]), l2_norm(lz.theta[n]), l2_norm(lz.rho[n])});

        const ControlTrajectory h1 =
            random_smooth_control(desk.grid(), desk.params.nt, rng, 1.0);
        const ControlTrajectory h2 =
            random_smooth_control(desk.grid(), desk.params.nt, rng, 1.0);
        const LinearizedTrajectory l1 = solve_linearized(base, h1, desk.params);
        const LinearizedTrajectory l2 = solve_linearized(base, h2, desk.params);
        const LinearizedTrajectory ls = solve_linearized(base, h1 + h2, desk.params);
        const LinearizedTrajectory ld = solve_linearized(base, 2.0 * h1, desk.params);
        double superpos = 0.0, scaling = 0.0;
        for (int n = 0; n <= l1.nt(); ++n) {
            superpos = std::max(superpos, l2_norm(ls.eta[n] - l1.eta[n] - l2.eta[n]));
            superpos = std::max(superpos, l2_norm(ls.theta[n] - l1.theta[n] - l2.theta[n]));
            superpos = std::max(superpos, l2_norm(ls.rho[n] - l1.rho[n] - l2.rho[n]));
            scaling = std::max(scaling, l2_norm(ld.eta[n] - 2.0 * l1.eta[n]));
            scaling = std::max(scaling, l2_norm(ld.theta[n] - 2.0 * l1.theta[n]));
            scaling = std::max(scaling, l2_norm(ld.rho[n] - 2.0 * l1.rho[n]));
        }
        const bool pass = zero_norm == 0.0 && superpos <= 1e-10 && scaling <= 1e-10;
        report(4, "linearized_wellposed", pass,
               fmt("zero=%.1e (exact), superpos=%.2e, scaling=%.2e (tol 1e-10)", zero_norm,
                   superpos, scaling),
               t.seconds());
    }

    // 5. Separation: margin > 0.05 at every step, no domain violation raised.
    {
        Timer t;
        Rng rng(seed + 4);
        const ControlTrajectory u = admissible(desk, rng, 0.45);
        bool domain_ok = true;
        double min_margin = std::numeric_limits<double>::infinity();
        try {
            const Trajectory traj = solve_state(desk.initial, u, desk.params);
            min_margin = std::min(
                min_value(desk.initial.phi) - desk.params.potential.r_minus(),
                desk.params.potential.r_plus() - max_value(desk.initial.phi));
            for (const StepStats& st : traj.step_stats) {
                min_margin =
                    std::min(min_margin, st.phi_min - desk.params.potential.r_minus());
                min_margin =
                    std::min(min_margin, desk.params.potential.r_plus() - st.phi_max);
            }
        } catch (const DomainViolation&) {
            domain_ok = false;
        }
        const bool pass = domain_ok && min_margin > 0.05;
        report(5, "separation", pass,
               fmt("min_margin=%.4f (> 0.05), domain_violation=%s", min_margin,
                   domain_ok ? "none" : "raised"),
               t.seconds());
    }

    // 6. Mass balance: per-step ledger bound and zero-control drift.
    {
        Timer t;
        Rng rng(seed + 5);
        const double bound = 10.0 * desk.params.newton.tol * desk.grid().measure();
        const ControlTrajectory u = admissible(desk, rng, 0.45);
        const Trajectory traj = solve_state(desk.initial, u, desk.params);
        double worst = 0.0;
        for (double r : mass_ledger(traj, u)) worst = std::max(worst, r);

        const ControlTrajectory zero(desk.grid(), desk.params.nt, 0.0);
        const Trajectory tz = solve_state(desk.initial, zero, desk.params);
        const Field one(desk.grid(), 1.0);
        auto mass = [&](const StateTriple& s) {
            return desk.params.alpha * inner(s.mu, one) + inner(s.phi, one) +
                   inner(s.sigma, one);
        };
        double drift = 0.0;
        for (int n = 0; n <= tz.nt(); ++n)
            drift = std::max(drift, std::abs(mass(tz.at(n)) - mass(tz.at(0))));
        const bool pass = worst <= bound && drift <= 1e-9;
        report(6, "mass_balance", pass,
               fmt("max_step_residual=%.2e (tol %.1e), drift=%.2e (tol 1e-9)", worst, bound,
                   drift),
               t.seconds());
    }

    // 7. ODE-oracle equivalence at dt = 5e-3 on homogeneous data.
    {
        Timer t;
        const Grid& g = desk.grid();
        const double phi0 = -0.3;
        const double mu0 = desk.params.potential.eval_F(phi0, 1);
        const double sigma0 = mu0;
        const double uc = 0.03;
        StateTriple init{Field(g, mu0), Field(g, phi0), Field(g, sigma0)};
        const ControlTrajectory u(g, desk.params.nt, uc);
        const Trajectory traj = solve_state(init, u, desk.params);
        std::vector<double> us(desk.params.nt, uc);
        const auto ref = ode_oracle(desk.params, {mu0, phi0, sigma0}, us, 100);
        double err = 0.0, scale = 0.0;
        for (int n = 0; n <= desk.params.nt; ++n) {
            err = std::max({err, std::abs(mean_value(traj.at(n).mu) - ref[n][0]),
                            std::abs(mean_value(traj.at(n).phi) - ref[n][1]),
                            std::abs(mean_value(traj.at(n).sigma) - ref[n][2])});
            for (int c = 0; c < 3; ++c) scale = std::max(scale, std::abs(ref[n][c]));
        }
        const double rel = err / scale;
        report(7, "ode_oracle", rel <= 1e-4, fmt("rel_error=%.2e (tol 1e-4, dt=5e-3)", rel),
               t.seconds());
    }

    // 8. Continuous dependence: Lipschitz ratios finite and halving-stable.
    {
        Timer t;
        Rng rng(seed + 6);
        bool pass = true;
        double lo = 1e300, hi = 0.0;
        for (int k = 0; k < 3; ++k) {
            const ControlTrajectory u1 = admissible(desk, rng, 0.45);
            const ControlTrajectory u2 = admissible(desk, rng, 0.45);
            const LipschitzCheckResult r =
                lipschitz_check(u1, u2, desk.initial, desk.params);
            for (double v : {r.full.combined_dual, r.full.improved, r.half.combined_dual,
                             r.half.improved})
                pass = pass && std::isfinite(v);
            const double s1 = r.half.combined_dual / r.full.combined_dual;
            const double s2 = r.half.improved / r.full.improved;
            lo = std::min({lo, s1, s2});
            hi = std::max({hi, s1, s2});
        }
        pass = pass && lo >= 0.5 && hi <= 2.0;
        report(8, "continuous_dependence", pass,
               fmt("stability ratios in [%.3f, %.3f], window [0.5, 2.0]", lo, hi),
               t.seconds());
    }

    // 9. Optimizer on the manufactured problem: monotone descent to <= 1e-8
    //    within 200 iterations, then the variational inequality at the end.
    {
        Timer t;
        const ManufacturedSetup setup = manufactured_problem();
        const ControlProblem& p = setup.problem;
        const ControlTrajectory u0(p.grid(), p.params.nt, 0.0);  // box midpoint

        // Problem-scale anchor for the VI threshold: gradient at the start
        // times the box diameter, both in L2(Q).
        const ControlTrajectory g0 = reduced_gradient(u0, p);
        const double dt = p.params.dt();
        ControlTrajectory width = u0;
        for (int n = 1; n <= p.params.nt; ++n) width.at(n) = p.box.upper - p.box.lower;
        const double vi_scale = l2q_norm(g0, dt) * l2q_norm(width, dt);

        OptimizerOptions opts;
        opts.max_iters = 200;
        opts.tol_stat = 1e-11;
        const OptimizationResult res = projected_gradient_descent(u0, p, opts);

        bool monotone = true;
        for (std::size_t i = 1; i < res.cost_history.size(); ++i)
            monotone = monotone && res.cost_history[i] <= res.cost_history[i - 1];
        const double j_end = res.cost_history.back();

        const ViCheckResult vi = variational_inequality_check(res.u_opt, p, 5, seed + 7);
        const bool pass = monotone && j_end <= 1e-8 && res.iterations <= 200 &&
                          vi.min_pairing >= -1e-8 * vi_scale && t.seconds() <= 600.0;
        report(9, "optimizer_manufactured", pass,
               fmt("J_end=%.2e (tol 1e-8) in %d its, monotone=%d, vi_min=%.2e >= %.2e", j_end,
                   res.iterations, monotone ? 1 : 0, vi.min_pairing, -1e-8 * vi_scale),
               t.seconds());
    }

    // 10. Adjoint consistency: first-order dt decay at fixed grid, and the
    //     extended-cost path (b5, b6 > 0) passes the criterion-1 check.
    {
        Timer t;
        Rng rng(seed + 8);
        const ControlTrajectory u_base = admissible(desk, rng, 0.4);
        std::vector<double> dts, residuals;
        for (int level = 0; level < 3; ++level) {
            ModelParams params = desk.params;
            params.nt = desk.params.nt << level;
            ControlTrajectory u(desk.grid(), params.nt, 0.0);
            for (int n = 1; n <= params.nt; ++n)
                u.at(n) = u_base.at((n - 1) / (1 << level) + 1);
            const Trajectory traj = solve_state(desk.initial, u, params);
            const AdjointTrajectory adj = solve_adjoint(traj, desk.cost, params);
            const AdjointPdeResiduals r = adjoint_pde_residual(adj, traj, desk.cost, params);
            dts.push_back(params.dt());
            residuals.push_back(r.combined);
        }
        const double slope = loglog_slope(dts, residuals);

        const GradientBatch ext = gradient_batch(desk_problem_extended_cost(), seed + 9, 5);
        const bool pass = slope >= 0.8 && slope <= 1.2 && ext.max_rel <= 1e-6 &&
                          ext.min_slope >= 1.8 && ext.max_slope <= 2.2;
        report(10, "adjoint_consistency", pass,
               fmt("pde_slope=%.3f in [0.8, 1.2]; b5/b6 gradient rel=%.2e slopes=[%.3f, %.3f]",
                   slope, ext.max_rel, ext.min_slope, ext.max_slope),
               t.seconds());
    }

    // 11. Mutation sensitivity: the flipped b3 adjoint source must break
    //     criteria 1 and 2.
    {
        Timer t;
        Rng rng(seed + 10);
        const ControlTrajectory u = admissible(desk, rng, 0.45);
        const ControlTrajectory h =
            random_smooth_control(desk.grid(), desk.params.nt, rng, 32.0);
        FaultInjection flip;
        flip.flip_adjoint_b3_sign = true;
        const GradientCheckResult gres = gradient_check(u, h, desk, flip);
        const DualityResult dres = duality_check(u, h, desk, flip);
        const bool pass = gres.rel_error > 1e-6 && dres.rel_residual > 1e-9;
        report(11, "mutation_sensitivity", pass,
               fmt("gradient_rel=%.2e (> 1e-6), duality_residual=%.2e (> 1e-9)",
                   gres.rel_error, dres.rel_residual),
               t.seconds());
    }

    std::printf("%s: %d criterion failure(s)\n",
                g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", g_failures);
    return g_failures;
}
