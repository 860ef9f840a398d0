#include "choc/verify.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "choc/rng.hpp"
#include "choc/sensitivity.hpp"
#include "choc/state_solver.hpp"

namespace choc {

std::string to_line(const CheckReport& r) {
    std::ostringstream os;
    os.precision(6);
    os << std::scientific;
    os << "check=" << r.name << " pass=" << (r.pass ? 1 : 0) << " tol=" << r.tolerance
       << " runtime_s=" << r.runtime_seconds;
    if (!r.inputs.empty()) os << " inputs=" << r.inputs;
    for (const auto& [k, v] : r.measured) os << " " << k << "=" << v;
    return os.str();
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log10(x[i]);
        const double ly = std::log10(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

namespace {

/// Directional derivative of the tracking part of the cost via the linearized
/// solve (the right-hand side of the duality identity).
double tracking_pairing(const Trajectory& base, const LinearizedTrajectory& lin,
                        const CostSpec& c, double dt) {
    double acc = 0.0;
    const int nt = base.nt();
    for (int n = 1; n <= nt; ++n) {
        const StateTriple& s = base.at(n);
        if (c.b1 != 0.0) acc += dt * c.b1 * inner(misfit(s.phi, c.phi_q, n), lin.theta[n]);
        if (c.b3 != 0.0) acc += dt * c.b3 * inner(misfit(s.sigma, c.sigma_q, n), lin.rho[n]);
        if (c.b5 != 0.0) acc += dt * c.b5 * inner(misfit(s.mu, c.mu_q, n), lin.eta[n]);
    }
    const StateTriple& fin = base.final();
    if (c.b2 != 0.0) acc += c.b2 * inner(misfit_terminal(fin.phi, c.phi_omega), lin.theta[nt]);
    if (c.b4 != 0.0) acc += c.b4 * inner(misfit_terminal(fin.sigma, c.sigma_omega), lin.rho[nt]);
    if (c.b6 != 0.0) acc += c.b6 * inner(misfit_terminal(fin.mu, c.mu_omega), lin.eta[nt]);
    return acc;
}

}  // namespace

DualityResult duality_check(const ControlTrajectory& u, const ControlTrajectory& h,
                            const ControlProblem& problem, const FaultInjection& fault) {
    const double dt = problem.params.dt();
    const Trajectory base = solve_state(problem.initial, u, problem.params);
    const AdjointTrajectory adj = solve_adjoint(base, problem.cost, problem.params, fault);
    const LinearizedTrajectory lin = solve_linearized(base, h, problem.params);

    DualityResult out;
    for (int n = 1; n <= base.nt(); ++n)
        out.lhs += dt * inner(adj.r_for_interval(n), h.at(n));
    out.rhs = tracking_pairing(base, lin, problem.cost, dt);

    const double floor = 1e-14 * std::max(1.0, l2q_norm(h, dt));
    out.rel_residual =
        std::abs(out.lhs - out.rhs) / std::max({std::abs(out.lhs), std::abs(out.rhs), floor});
    return out;
}

GradientCheckResult gradient_check(const ControlTrajectory& u, const ControlTrajectory& h,
                                   const ControlProblem& problem, const FaultInjection& fault) {
    const double dt = problem.params.dt();
    const ControlTrajectory g = reduced_gradient(u, problem, fault);
    const double exact = inner_q(g, h, dt);

    const std::array<double, 3> eps{1e-3, 1e-4, 1e-5};
    std::array<double, 3> abs_err{};
    GradientCheckResult out;
    out.directional = exact;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double jp = reduced_cost(u + eps[i] * h, problem);
        const double jm = reduced_cost(u - eps[i] * h, problem);
        const double fd = (jp - jm) / (2.0 * eps[i]);
        abs_err[i] = std::abs(fd - exact);
        out.rel_errors[i] = abs_err[i] / std::abs(exact);
        if (i == 1) out.rel_error = out.rel_errors[i];
    }
    out.slope = loglog_slope(eps, abs_err);
    return out;
}

FrechetOrderResult frechet_order_check(const ControlTrajectory& u, const ControlTrajectory& h0,
                                       const StateTriple& initial, const ModelParams& params) {
    FrechetOrderResult out;
    const std::array<double, 3> scales{1e-1, 1e-2, 1e-3};
    for (std::size_t i = 0; i < scales.size(); ++i) {
        const RemainderNorms r = frechet_remainder(u, scales[i] * h0, initial, params);
        out.h_norms[i] = r.h_norm;
        out.remainder_norms[i] = r.combined;
    }
    out.slope = loglog_slope(out.h_norms, out.remainder_norms);
    const double c0 = out.remainder_norms[0] / (out.h_norms[0] * out.h_norms[0]);
    const double c1 = out.remainder_norms[1] / (out.h_norms[1] * out.h_norms[1]);
    out.fitted_constant_ratio = c1 / c0;
    return out;
}

namespace {

struct DiffNorms {
    double linf_h = 0.0;   // max_n ||y_n||_{L2}
    double l2_h = 0.0;     // (sum dt ||y_n||^2)^{1/2}, nodes 1..nt
    double l2_v = 0.0;     // (sum dt (||y_n||^2 + |y_n|_{H1}^2))^{1/2}
    double linf_v = 0.0;   // max_n (||y_n||^2 + |y_n|_{H1}^2)^{1/2}
    double h1_time = 0.0;  // (sum dt ||(y_n - y_{n-1})/dt||^2 + sum dt ||y_n||^2)^{1/2}
};

DiffNorms diff_norms(const std::vector<Field>& y, double dt) {
    DiffNorms out;
    double l2h_acc = 0.0, l2v_acc = 0.0, dt_acc = 0.0;
    for (std::size_t n = 0; n < y.size(); ++n) {
        const double l2sq = inner(y[n], y[n]);
        const double h1sq = h1_seminorm_sq(y[n]);
        out.linf_h = std::max(out.linf_h, std::sqrt(l2sq));
        out.linf_v = std::max(out.linf_v, std::sqrt(l2sq + h1sq));
        if (n >= 1) {
            l2h_acc += dt * l2sq;
            l2v_acc += dt * (l2sq + h1sq);
            const Field d = y[n] - y[n - 1];
            dt_acc += inner(d, d) / dt;  // dt * ||d/dt||^2
        }
    }
    out.l2_h = std::sqrt(l2h_acc);
    out.l2_v = std::sqrt(l2v_acc);
    out.h1_time = std::sqrt(dt_acc + l2h_acc);
    return out;
}

LipschitzRatios lipschitz_ratios(const Trajectory& t1, const Trajectory& t2,
                                 const ControlTrajectory& u1, const ControlTrajectory& u2,
                                 const ModelParams& params) {
    const double dt = params.dt();
    const int nt = t1.nt();
    std::vector<Field> dmu, dphi, dsigma;
    std::vector<double> combo_dual(nt + 1);
    for (int n = 0; n <= nt; ++n) {
        dmu.push_back(t1.at(n).mu - t2.at(n).mu);
        dphi.push_back(t1.at(n).phi - t2.at(n).phi);
        dsigma.push_back(t1.at(n).sigma - t2.at(n).sigma);
        Field combo = params.alpha * dmu[n];
        combo += dphi[n];
        combo += dsigma[n];
        combo_dual[static_cast<std::size_t>(n)] = dual_norm(combo);
    }
    const DiffNorms nm = diff_norms(dmu, dt);
    const DiffNorms np = diff_norms(dphi, dt);
    const DiffNorms ns = diff_norms(dsigma, dt);

    LipschitzRatios out;
    double dual_max = 0.0;
    for (double v : combo_dual) dual_max = std::max(dual_max, v);
    out.num_combined_dual = dual_max + nm.l2_h + np.linf_h + np.l2_v + ns.linf_h + ns.l2_v;
    out.num_improved = nm.linf_h + nm.l2_v + np.h1_time + np.linf_v;
    out.num_sigma = ns.linf_h + ns.l2_v;
    out.control_distance = l2q_norm(u1 - u2, dt);
    out.combined_dual = out.num_combined_dual / out.control_distance;
    out.improved = out.num_improved / out.control_distance;
    out.sigma_only = out.num_sigma / out.control_distance;
    return out;
}

}  // namespace

LipschitzCheckResult lipschitz_check(const ControlTrajectory& u1, const ControlTrajectory& u2,
                                     const StateTriple& initial, const ModelParams& params) {
    const Trajectory t1 = solve_state(initial, u1, params);
    const Trajectory t2 = solve_state(initial, u2, params);
    ControlTrajectory umid = 0.5 * (u1 + u2);
    const Trajectory tmid = solve_state(initial, umid, params);

    LipschitzCheckResult out;
    out.full = lipschitz_ratios(t1, t2, u1, u2, params);
    out.half = lipschitz_ratios(t1, tmid, u1, umid, params);
    return out;
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

std::vector<std::array<double, 3>> ode_oracle(const ModelParams& params,
                                              std::array<double, 3> initial,
                                              std::span<const double> u_per_interval,
                                              int substeps) {
    const int nt = static_cast<int>(u_per_interval.size());
    const double dt = params.dt() / substeps;

    auto deriv = [&params](const std::array<double, 3>& y, double u) -> std::array<double, 3> {
        const double mu = y[0], phi = y[1], sigma = y[2];
        const double phi_dot = (mu - params.potential.eval_F(phi, 1)) / params.beta;
        const double exch = params.prolif.eval(phi, 0) * (sigma - mu);
        const double mu_dot = (exch - phi_dot) / params.alpha;
        const double sigma_dot = -exch + u;
        return {mu_dot, phi_dot, sigma_dot};
    };

    std::vector<std::array<double, 3>> nodes;
    nodes.reserve(nt + 1);
    nodes.push_back(initial);
    std::array<double, 3> y = initial;
    for (int n = 0; n < nt; ++n) {
        const double u = u_per_interval[static_cast<std::size_t>(n)];
        for (int s = 0; s < substeps; ++s) {
            const auto k1 = deriv(y, u);
            std::array<double, 3> y2;
            for (int c = 0; c < 3; ++c) y2[c] = y[c] + 0.5 * dt * k1[c];
            const auto k2 = deriv(y2, u);
            std::array<double, 3> y3;
            for (int c = 0; c < 3; ++c) y3[c] = y[c] + 0.5 * dt * k2[c];
            const auto k3 = deriv(y3, u);
            std::array<double, 3> y4;
            for (int c = 0; c < 3; ++c) y4[c] = y[c] + dt * k3[c];
            const auto k4 = deriv(y4, u);
            for (int c = 0; c < 3; ++c)
                y[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        nodes.push_back(y);
    }
    return nodes;
}

std::vector<Field> heat_oracle(const Field& y0, const ControlTrajectory& u, double dt) {
    // (1/dt - Lap) y_n = y_{n-1}/dt + u_n, plain CG (the operator is SPD).
    std::vector<Field> out{y0};
    auto apply = [&](const Field& x) {
        Field r = laplacian(x);
        auto rv = r.values();
        const auto xv = x.values();
        for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = xv[i] / dt - rv[i];
        return r;
    };
    for (int n = 1; n <= u.nt(); ++n) {
        Field b = (1.0 / dt) * out.back();
        b += u.at(n);
        Field x = out.back();  // warm start
        Field r = b - apply(x);
        Field p = r;
        double rr = inner(r, r);
        const double b2 = inner(b, b);
        for (int it = 0; it < 20000 && rr > 1e-28 * std::max(b2, 1.0); ++it) {
            const Field ap = apply(p);
            const double alpha = rr / inner(p, ap);
            axpy(alpha, p, x);
            axpy(-alpha, ap, r);
            const double rr_new = inner(r, r);
            const double beta = rr_new / rr;
            rr = rr_new;
            auto pv = p.values();
            const auto rv = r.values();
            for (std::size_t i = 0; i < pv.size(); ++i) pv[i] = rv[i] + beta * pv[i];
        }
        out.push_back(std::move(x));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

ControlProblem desk_problem() {
    const int n = 64;
    const double len = 1.0;
    const Grid g = build_grid(1, std::array<int, 1>{n}, std::array<double, 1>{len});

    ControlProblem p;
    p.params.alpha = 0.5;
    p.params.beta = 0.5;
    p.params.potential = Potential::make_logarithmic(2.0);
    p.params.prolif = Proliferation::make_sigmoid(1.0, 2.0);
    p.params.t_final = 0.25;
    p.params.nt = 50;

    p.initial.mu = Field(g, 0.0);
    p.initial.phi = cosine_field(g, 0.3, {1, 0, 0});
    p.initial.sigma = Field(g, 0.5);

    p.box.lower = Field(g, -1.0);
    p.box.upper = Field(g, 1.0);

    p.cost.b0 = 0.1;
    p.cost.b1 = 1.0;
    p.cost.b2 = 1.0;
    p.cost.b3 = 1.0;
    p.cost.b4 = 1.0;
    p.cost.phi_q = TimeTarget(Field(g, -0.2));
    p.cost.sigma_q = TimeTarget(Field(g, 0.3));
    p.cost.phi_omega = Field(g, 0.1);
    p.cost.sigma_omega = Field(g, 0.4);
    return p;
}

ControlProblem desk_problem_extended_cost() {
    ControlProblem p = desk_problem();
    const Grid& g = p.grid();
    p.cost.b5 = 0.5;
    p.cost.b6 = 0.5;
    p.cost.mu_q = TimeTarget(Field(g, 0.1));
    p.cost.mu_omega = Field(g, -0.1);
    return p;
}

ManufacturedSetup manufactured_problem() {
    ManufacturedSetup setup;
    setup.problem = desk_problem();
    ControlProblem& p = setup.problem;
    const Grid& g = p.grid();
    const int nt = p.params.nt;

    // Spatially homogeneous scenario with a terminal sigma-tracking cost.
    // Distributed tracking with b0 = 0 leaves near-null time-oscillatory
    // control directions that a plain projected gradient cannot flush through
    // the 1e-8 basin within the iteration budget; terminal tracking makes
    // that complement exactly null and the image space well conditioned.
    p.initial.mu = Field(g, 0.0);
    p.initial.phi = Field(g, 0.2);
    p.initial.sigma = Field(g, 0.5);

    ControlTrajectory u_dagger(g, nt, 0.4);  // interior to the [-1, 1] box
    setup.u_dagger = u_dagger;

    const Trajectory traj = solve_state(p.initial, u_dagger, p.params);
    std::vector<Field> phi_nodes, sigma_nodes;
    for (int n = 0; n <= nt; ++n) {
        phi_nodes.push_back(traj.at(n).phi);
        sigma_nodes.push_back(traj.at(n).sigma);
    }
    p.cost.b0 = 0.0;
    p.cost.b1 = 0.0;
    p.cost.b2 = 0.0;
    p.cost.b3 = 0.0;
    p.cost.b4 = 50.0;
    // All targets are generated from the u_dagger trajectory; only the
    // b4-weighted one enters the cost.
    p.cost.phi_q = TimeTarget(std::move(phi_nodes));
    p.cost.sigma_q = TimeTarget(std::move(sigma_nodes));
    p.cost.phi_omega = traj.final().phi;
    p.cost.sigma_omega = traj.final().sigma;
    return setup;
}

// ---------------------------------------------------------------------------
// Full suite
// ---------------------------------------------------------------------------

namespace {

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

ControlTrajectory admissible_random_control(const ControlProblem& p, Rng& rng, double amp) {
    ControlTrajectory u = random_smooth_control(p.grid(), p.params.nt, rng, amp);
    return project_box(u, p.box);
}

double max_node_l2(const LinearizedTrajectory& a, const LinearizedTrajectory& b, double scale_b) {
    double m = 0.0;
    for (int n = 0; n <= a.nt(); ++n) {
        m = std::max(m, l2_norm(a.eta[n] - scale_b * b.eta[n]));
        m = std::max(m, l2_norm(a.theta[n] - scale_b * b.theta[n]));
        m = std::max(m, l2_norm(a.rho[n] - scale_b * b.rho[n]));
    }
    return m;
}

}  // namespace

std::vector<CheckReport> run_all_checks(const ControlProblem& problem,
                                        unsigned long long seed) {
    std::vector<CheckReport> reports;
    Rng rng(seed);

    // 1. Gradient check, 5 seeded pairs.
    {
        Timer t;
        CheckReport rep;
        rep.name = "gradient";
        rep.tolerance = 1e-6;
        rep.inputs = "5 seeded (u,h) pairs, eps {1e-3,1e-4,1e-5}";
        double worst_err = 0.0, min_slope = 1e9, max_slope = -1e9;
        bool pass = true;
        for (int k = 0; k < 5; ++k) {
            const ControlTrajectory u = admissible_random_control(problem, rng, 0.45);
            // Large direction amplitude: only eps*h enters the solver, and the
            // cubic term must dominate the FD noise floor at eps = 1e-5.
            const ControlTrajectory h = random_smooth_control(problem.grid(), problem.params.nt,
                                                              rng, 32.0);
            const GradientCheckResult r = gradient_check(u, h, problem);
            worst_err = std::max(worst_err, r.rel_error);
            min_slope = std::min(min_slope, r.slope);
            max_slope = std::max(max_slope, r.slope);
            // Primary: second-order decay across all three levels. Fallback for
            // configurations where the finest level sits in the FD noise floor:
            // clean decay over the first two levels and a third error that did
            // not grow (a biased gradient plateaus at its bias on every level
            // and fails both forms).
            const bool slope_ok = r.slope >= 1.8 && r.slope <= 2.2;
            const double slope12 = std::log10(r.rel_errors[0] / r.rel_errors[1]);
            const bool floor_ok = slope12 >= 1.8 && slope12 <= 2.2 &&
                                  r.rel_errors[2] <= 1.05 * r.rel_errors[1];
            pass = pass && r.rel_error <= 1e-6 && (slope_ok || floor_ok);
        }
        rep.measured = {{"max_rel_error", worst_err},
                        {"min_slope", min_slope},
                        {"max_slope", max_slope}};
        rep.pass = pass;
        rep.runtime_seconds = t.seconds();
        reports.push_back(std::move(rep));
    }

    // 2. Duality identity, 5 seeded pairs.
    {
        Timer t;
        CheckReport rep;
        rep.name = "duality";
        rep.tolerance = 1e-9;
        rep.inputs = "5 seeded (u,h) pairs";
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            const ControlTrajectory u = admissible_random_control(problem, rng, 0.45);
            const ControlTrajectory h =
                random_smooth_control(problem.grid(), problem.params.nt, rng, 1.0);
            const DualityResult r = duality_check(u, h, problem);
            worst = std::max(worst, r.rel_residual);
        }
        rep.measured = {{"max_rel_residual", worst}};
        rep.pass = worst <= 1e-9;
        rep.runtime_seconds = t.seconds();
        reports.push_back(std::move(rep));
    }

    // 3. Frechet order.
    {
        Timer t;
        CheckReport rep;
        rep.name = "frechet_order";
        rep.tolerance = 0.2;  // slope window half-width around 2
        const ControlTrajectory u = admissible_random_control(problem, rng, 0.4);
        const ControlTrajectory h0 =
            random_smooth_control(problem.grid(), problem.params.nt, rng, 0.5);
        const FrechetOrderResult r =
            frechet_order_check(u, h0, problem.initial, problem.params);
        rep.inputs = "||h|| levels {1e-1,1e-2,1e-3} of a seeded h0";
        rep.measured = {{"slope", r.slope},
                        {"constant_ratio", r.fitted_constant_ratio},
                        {"rem0", r.remainder_norms[0]},
                        {"rem2", r.remainder_norms[2]}};
        rep.pass = r.slope >= 1.8 && r.slope <= 2.2 && r.fitted_constant_ratio >= 0.5 &&
                   r.fitted_constant_ratio <= 2.0;
        rep.runtime_seconds = t.seconds();
        reports.push_back(std::move(rep));
    }

    // 4. Linearized well-posedness proxies: zero data, superposition, scaling.
    {
        Timer t;
        CheckReport rep;
        rep.name = "linearized_wellposedness";
        rep.tolerance = 1e-10;
        const ControlTrajectory u = admissible_random_control(problem, rng, 0.4);
        const Trajectory base = solve_state(problem.initial, u, problem.params);
        const ControlTrajectory h1 =
            random_smooth_control(problem.grid(), problem.params.nt, rng, 1.0);
        const ControlTrajectory h2 =
            random_smooth_control(problem.grid(), problem.params.nt, rng, 1.0);

        const ControlTrajectory zero(problem.grid(), problem.params.nt, 0.0);
        const LinearizedTrajectory lz = solve_linearized(base, zero, problem.params);
        double zero_norm = 0.0;
        for (int n = 0; n <= lz.nt(); ++n)
            zero_norm = std::max({zero_norm, l2_norm(lz.eta[n]), l2_norm(lz.theta[n]),
                                  l2_norm(lz.rho[n])});

        const LinearizedTrajectory l1 = solve_linearized(base, h1, problem.params);
        const LinearizedTrajectory l2 = solve_linearized(base, h2, problem.params);
        LinearizedTrajectory lsum = solve_linearized(base, h1 + h2, problem.params);
        for (int n = 0; n <= lsum.nt(); ++n) {
            lsum.eta[n] -= l1.eta[n];
            lsum.theta[n] -= l1.theta[n];
            lsum.rho[n] -= l1.rho[n];
        }
        const double superpos = max_node_l2(lsum, l2, 1.0);
        const LinearizedTrajectory ldouble = solve_linearized(base, 2.0 * h1, problem.params);
        const double scaling = max_node_l2(ldouble, l1, 2.0);

        rep.measured = {{"zero_data_norm", zero_norm},
                        {"superposition_dev", superpos},
                        {"scaling_dev", scaling}};
        rep.pass = zero_norm == 0.0 && superpos <= 1e-10 && scaling <= 1e-10;
        rep.runtime_seconds = t.seconds();
        reports.push_back(std::move(rep));
    }

    // 5. Mass ledger.
    {
        Timer t;
        CheckReport rep;
        rep.name = "mass_ledger";
        const double bound = 10.0 * problem.params.newton.tol * problem.grid().measure();
        rep.tolerance = bound;
        const ControlTrajectory u = admissible_random_control(problem, rng, 0.45);
        const Trajectory traj = solve_state(problem.initial, u, problem.params);
        double worst = 0.0;
        for (double rres : mass_ledger(traj, u)) worst = std::max(worst, rres);

        const ControlTrajectory zero(problem.grid(), problem.params.nt, 0.0);
        const Trajectory tz = solve_state(problem.initial, zero, problem.params);
        const Grid& g = problem.grid();
        const Field one(g, 1.0);
        auto mass = [&](const StateTriple& s) {
            return problem.params.alpha * inner(s.mu, one) + inner(s.phi, one) +
                   inner(s.sigma, one);
        };
        const double drift = std::abs(mass(tz.final()) - mass(tz.at(0)));

        rep.measured = {{"max_step_residual", worst}, {"zero_control_drift", drift}};
        rep.pass = worst <= bound && drift <= 1e-9;
        rep.runtime_seconds = t.seconds();
        reports.push_back(std::move(rep));
    }

    // 6. Separation.
    {
        Timer t;
        CheckReport rep;
        rep.name = "separation";
        rep.tolerance = 0.05;
        const ControlTrajectory u = admissible_random_control(problem, rng, 0.45);
        bool domain_ok = true;
        double margin = 0.0, phi_min = 0.0, phi_max = 0.0;
        try {
            const Trajectory traj = solve_state(problem.initial, u, problem.params);
            const SeparationReport sr = separation_report(traj, problem.params.potential);
            margin = sr.margin;
            phi_min = sr.phi_min;
            phi_max = sr.phi_max;
        } catch (const DomainViolation&) {
            domain_ok = false;
        }
        rep.measured = {{"margin", margin}, {"phi_min", phi_min}, {"phi_max", phi_max}};
        rep.pass = domain_ok && margin > 0.05;
        rep.runtime_seconds = t.seconds();
        reports.push_back(std::move(rep));
    }

    // 7. Lipschitz continuous dependence, 3 seeded pairs.
    {
        Timer t;
        CheckReport rep;
        rep.name = "lipschitz";
        rep.inputs = "3 seeded control pairs, halving stability";
        rep.tolerance = 2.0;
        bool ok = true;
        double worst_ratio = 0.0, best_ratio = 1e9;
        double max_constant = 0.0;
        for (int k = 0; k < 3; ++k) {
            const ControlTrajectory u1 = admissible_random_control(problem, rng, 0.45);
            const ControlTrajectory u2 = admissible_random_control(problem, rng, 0.45);
            const LipschitzCheckResult r =
                lipschitz_check(u1, u2, problem.initial, problem.params);
            for (double v : {r.full.combined_dual, r.full.improved, r.half.combined_dual,
                             r.half.improved})
                if (!std::isfinite(v)) ok = false;
            const double stab1 = r.half.combined_dual / r.full.combined_dual;
            const double stab2 = r.half.improved / r.full.improved;
            worst_ratio = std::max({worst_ratio, stab1, stab2});
            best_ratio = std::min({best_ratio, stab1, stab2});
            max_constant = std::max({max_constant, r.full.combined_dual, r.full.improved});
        }
        rep.measured = {{"min_stability_ratio", best_ratio},
                        {"max_stability_ratio", worst_ratio},
                        {"max_lipschitz_constant", max_constant}};
        rep.pass = ok && best_ratio >= 0.5 && worst_ratio <= 2.0;
        rep.runtime_seconds = t.seconds();
        reports.push_back(std::move(rep));
    }

    // 8. ODE oracle on a spatially homogeneous companion scenario.
    {
        Timer t;
        CheckReport rep;
        rep.name = "ode_oracle";
        rep.tolerance = 1e-4;
        const Grid& g = problem.grid();
        ModelParams params = problem.params;

        const double phi0 = -0.3;
        const double mu0 = params.potential.eval_F(phi0, 1);
        const double sigma0 = mu0;  // zero exchange term at t = 0
        const double u_const = 0.03;

        StateTriple init{Field(g, mu0), Field(g, phi0), Field(g, sigma0)};
        ControlTrajectory u(g, params.nt, u_const);
        const Trajectory traj = solve_state(init, u, params);

        std::vector<double> u_scalar(static_cast<std::size_t>(params.nt), u_const);
        const auto ref = ode_oracle(params, {mu0, phi0, sigma0}, u_scalar, 100);
        const auto ref_half = ode_oracle(params, {mu0, phi0, sigma0}, u_scalar, 200);

        double self_dev = 0.0, err = 0.0, scale = 0.0;
        for (int n = 0; n <= params.nt; ++n) {
            for (int c = 0; c < 3; ++c) {
                self_dev = std::max(self_dev, std::abs(ref[n][c] - ref_half[n][c]));
                scale = std::max(scale, std::abs(ref[n][c]));
            }
            err = std::max(err, std::abs(mean_value(traj.at(n).mu) - ref[n][0]));
            err = std::max(err, std::abs(mean_value(traj.at(n).phi) - ref[n][1]));
            err = std::max(err, std::abs(mean_value(traj.at(n).sigma) - ref[n][2]));
        }
        const double rel = err / scale;
        rep.measured = {{"rel_error", rel}, {"oracle_self_dev", self_dev}, {"scale", scale}};
        rep.pass = rel <= 1e-4 && self_dev <= 1e-10;
        rep.runtime_seconds = t.seconds();
        reports.push_back(std::move(rep));
    }

    // 9. Adjoint PDE consistency under dt-halving at fixed grid.
    {
        Timer t;
        CheckReport rep;
        rep.name = "adjoint_pde_consistency";
        rep.inputs = "dt halved three times at fixed grid, slope over the finest levels";
        rep.tolerance = 0.2;  // slope window half-width around 1
        const ControlTrajectory u_base = admissible_random_control(problem, rng, 0.4);
        std::vector<double> dts, residuals;
        for (int level = 0; level < 4; ++level) {
            ModelParams params = problem.params;
            params.nt = problem.params.nt << level;
            ControlTrajectory u(problem.grid(), params.nt, 0.0);
            for (int n = 1; n <= params.nt; ++n)
                u.at(n) = u_base.at((n - 1) / (1 << level) + 1);
            const Trajectory traj = solve_state(problem.initial, u, params);
            const AdjointTrajectory adj = solve_adjoint(traj, problem.cost, params);
            const AdjointPdeResiduals r =
                adjoint_pde_residual(adj, traj, problem.cost, params);
            dts.push_back(params.dt());
            residuals.push_back(r.combined);
        }
        // The coarsest level can sit outside the asymptotic regime on coarse
        // user configurations; the fit uses the finest three levels.
        const double slope = loglog_slope(std::span(dts).subspan(1, 3),
                                          std::span(residuals).subspan(1, 3));
        rep.measured = {{"slope", slope},
                        {"residual_coarse", residuals[0]},
                        {"residual_fine", residuals[3]}};
        rep.pass = slope >= 0.8 && slope <= 1.2;
        rep.runtime_seconds = t.seconds();
        reports.push_back(std::move(rep));
    }

    // 10. Mutation sensitivity: injected defects must break the identities.
    {
        Timer t;
        CheckReport rep;
        rep.name = "mutation_sensitivity";
        rep.inputs = "flip b3 sign in adjoint source; drop F'' in PDE residual";
        rep.tolerance = 0.0;
        const ControlTrajectory u = admissible_random_control(problem, rng, 0.45);
        const ControlTrajectory h =
            random_smooth_control(problem.grid(), problem.params.nt, rng, 1.0);

        FaultInjection flip;
        flip.flip_adjoint_b3_sign = true;
        const DualityResult dres = duality_check(u, h, problem, flip);
        const GradientCheckResult gres = gradient_check(u, h, problem, flip);

        const Trajectory traj = solve_state(problem.initial, u, problem.params);
        const AdjointTrajectory adj = solve_adjoint(traj, problem.cost, problem.params);
        const AdjointPdeResiduals clean =
            adjoint_pde_residual(adj, traj, problem.cost, problem.params);
        FaultInjection drop;
        drop.drop_fpp_in_residual = true;
        const AdjointPdeResiduals mutated =
            adjoint_pde_residual(adj, traj, problem.cost, problem.params, drop);

        rep.measured = {{"duality_residual_under_flip", dres.rel_residual},
                        {"gradient_error_under_flip", gres.rel_error},
                        {"pde_residual_clean", clean.q_equation},
                        {"pde_residual_no_fpp", mutated.q_equation}};
        rep.pass = dres.rel_residual > 1e-9 && gres.rel_error > 1e-6 &&
                   mutated.q_equation > clean.q_equation;
        rep.runtime_seconds = t.seconds();
        reports.push_back(std::move(rep));
    }

    return reports;
}

}  // namespace choc
