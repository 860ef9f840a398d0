#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "choc/linear_ops.hpp"
#include "choc/state_solver.hpp"
#include "choc/verify.hpp"
#include "doctest.h"

using namespace choc;

namespace {

Grid grid1d(int n, double len = 1.0) {
    return build_grid(1, std::array<int, 1>{n}, std::array<double, 1>{len});
}

}  // namespace

TEST_CASE("validate_hypotheses: margins and named violations") {
    ControlProblem p = desk_problem();
    const Grid& g = p.grid();

    SUBCASE("phi0 = 0 under the logarithmic potential gives H9 margin 1") {
        p.initial.phi = Field(g, 0.0);
        const HypothesesReport rep = validate_hypotheses(p);
        CHECK(rep.h9_margin == doctest::Approx(1.0));
        CHECK(rep.all_ok());
        CHECK(std::isfinite(rep.h10_norm));
    }

    SUBCASE("inverted control box violates H2") {
        p.box.lower = Field(g, 1.0);
        p.box.upper = Field(g, 0.0);
        CHECK_THROWS_WITH_AS(validate_hypotheses(p), doctest::Contains("H2"), ConfigError);
    }

    SUBCASE("all-zero weights violate H1") {
        p.cost = CostSpec{};
        CHECK_THROWS_WITH_AS(validate_hypotheses(p), doctest::Contains("H1"), ConfigError);
    }

    SUBCASE("alpha <= 0 violates H3") {
        p.params.alpha = 0.0;
        CHECK_THROWS_WITH_AS(validate_hypotheses(p), doctest::Contains("H3"), ConfigError);
    }

    SUBCASE("phi0 at the domain boundary violates H9") {
        p.initial.phi = Field(g, 1.0);
        CHECK_THROWS_WITH_AS(validate_hypotheses(p), doctest::Contains("H9"), ConfigError);
    }
}

TEST_CASE("exact equilibrium is a fixed point of the stepper") {
    // Regular potential, F'(0) = 0, everything zero: the origin is stationary.
    const Grid g = grid1d(16);
    ModelParams params;
    params.potential = Potential::make_regular();
    params.prolif = Proliferation::make_sigmoid(1.0, 2.0);
    params.t_final = 0.1;
    params.nt = 10;

    StateTriple init{Field(g, 0.0), Field(g, 0.0), Field(g, 0.0)};
    const ControlTrajectory u(g, params.nt, 0.0);
    const Trajectory traj = solve_state(init, u, params);
    for (int n = 0; n <= params.nt; ++n) {
        CHECK(l2_norm(traj.at(n).mu) <= 1e-11);
        CHECK(l2_norm(traj.at(n).phi) <= 1e-11);
        CHECK(l2_norm(traj.at(n).sigma) <= 1e-11);
    }
}

TEST_CASE("converged steps satisfy the residual contract") {
    ControlProblem p = desk_problem();
    p.params.nt = 10;
    const ControlTrajectory u(p.grid(), p.params.nt, 0.25);
    const Trajectory traj = solve_state(p.initial, u, p.params);
    const std::size_t N = p.grid().size();
    std::vector<double> res(3 * N);
    for (int n = 1; n <= p.params.nt; ++n) {
        state_step_residual(traj.at(n), traj.at(n - 1), u.at(n), p.params, res);
        CHECK(stacked_l2(res, p.grid().cell_volume) <= p.params.newton.tol);
        CHECK(traj.step_stats[n - 1].residual <= p.params.newton.tol);
    }
}

TEST_CASE("P = 0, spatially constant data: sigma frozen, (mu, phi) follow the 0-D ODE") {
    const Grid g = grid1d(8);
    ModelParams params;
    params.alpha = 0.5;
    params.beta = 0.5;
    params.potential = Potential::make_regular();
    params.prolif = Proliferation::make_constant(0.0);
    params.t_final = 0.25;
    params.nt = 250;  // dt = 1e-3

    const double phi0 = 0.3;
    const double mu0 = params.potential.eval_F(phi0, 1) + 0.02;
    const double sigma0 = 0.7;
    StateTriple init{Field(g, mu0), Field(g, phi0), Field(g, sigma0)};
    const ControlTrajectory u(g, params.nt, 0.0);
    const Trajectory traj = solve_state(init, u, params);

    // sigma solves a pure heat equation with constant data: unchanged.
    for (int n = 0; n <= params.nt; ++n)
        CHECK(mean_value(traj.at(n).sigma) == doctest::Approx(sigma0).epsilon(1e-10));

    std::vector<double> u_scalar(params.nt, 0.0);
    const auto ref = ode_oracle(params, {mu0, phi0, sigma0}, u_scalar, 100);
    double err = 0.0, scale = 0.0;
    for (int n = 0; n <= params.nt; ++n) {
        err = std::max(err, std::abs(mean_value(traj.at(n).mu) - ref[n][0]));
        err = std::max(err, std::abs(mean_value(traj.at(n).phi) - ref[n][1]));
        for (int c = 0; c < 3; ++c) scale = std::max(scale, std::abs(ref[n][c]));
    }
    CHECK(err / scale <= 1e-4);
    // The run is genuinely dynamic: phi moves visibly against that tolerance.
    CHECK(std::abs(mean_value(traj.final().phi) - phi0) > 1e-3);
}

TEST_CASE("full model ODE-oracle equivalence on homogeneous data (dt = 1e-3)") {
    const Grid g = grid1d(8);
    ModelParams params;
    params.t_final = 0.25;
    params.nt = 250;

    const double phi0 = -0.3;
    const double mu0 = params.potential.eval_F(phi0, 1);
    const double sigma0 = mu0;
    const double uc = 0.03;
    StateTriple init{Field(g, mu0), Field(g, phi0), Field(g, sigma0)};
    const ControlTrajectory u(g, params.nt, uc);
    const Trajectory traj = solve_state(init, u, params);

    std::vector<double> u_scalar(params.nt, uc);
    const auto ref = ode_oracle(params, {mu0, phi0, sigma0}, u_scalar, 100);
    double err = 0.0, scale = 0.0;
    for (int n = 0; n <= params.nt; ++n) {
        err = std::max({err, std::abs(mean_value(traj.at(n).mu) - ref[n][0]),
                        std::abs(mean_value(traj.at(n).phi) - ref[n][1]),
                        std::abs(mean_value(traj.at(n).sigma) - ref[n][2])});
        for (int c = 0; c < 3; ++c) scale = std::max(scale, std::abs(ref[n][c]));
    }
    CHECK(err / scale <= 1e-4);
}

TEST_CASE("deterministic reproducibility: identical runs are bit-identical") {
    ControlProblem p = desk_problem();
    p.params.nt = 12;
    const ControlTrajectory u(p.grid(), p.params.nt, 0.3);
    const Trajectory a = solve_state(p.initial, u, p.params);
    const Trajectory b = solve_state(p.initial, u, p.params);
    for (int n = 0; n <= p.params.nt; ++n)
        for (std::size_t i = 0; i < p.grid().size(); ++i) {
            CHECK(a.at(n).mu[i] == b.at(n).mu[i]);
            CHECK(a.at(n).phi[i] == b.at(n).phi[i]);
            CHECK(a.at(n).sigma[i] == b.at(n).sigma[i]);
        }
}

TEST_CASE("mass ledger: conservation, constant-control drift, step bound") {
    ControlProblem p = desk_problem();
    const Grid& g = p.grid();
    const double measure = g.measure();
    const Field one(g, 1.0);
    auto mass = [&](const StateTriple& s) {
        return p.params.alpha * inner(s.mu, one) + inner(s.phi, one) + inner(s.sigma, one);
    };

    SUBCASE("u = 0 conserves the sum across all steps") {
        const ControlTrajectory u(g, p.params.nt, 0.0);
        const Trajectory traj = solve_state(p.initial, u, p.params);
        const double m0 = mass(traj.at(0));
        for (int n = 1; n <= p.params.nt; ++n)
            CHECK(std::abs(mass(traj.at(n)) - m0) <= 1e-9);
        for (double r : mass_ledger(traj, u))
            CHECK(r <= 10.0 * p.params.newton.tol * measure);
    }

    SUBCASE("u = c drifts by c |Omega| T (telescoping)") {
        const double c = 0.4;
        const ControlTrajectory u(g, p.params.nt, c);
        const Trajectory traj = solve_state(p.initial, u, p.params);
        const double drift = mass(traj.final()) - mass(traj.at(0));
        CHECK(drift == doctest::Approx(c * measure * p.params.t_final).epsilon(1e-8));
        for (double r : mass_ledger(traj, u))
            CHECK(r <= 10.0 * p.params.newton.tol * measure);
    }
}

TEST_CASE("separation report") {
    ControlProblem p = desk_problem();

    SUBCASE("regular potential: infinite margin") {
        Trajectory traj;
        traj.params = p.params;
        traj.states.push_back(p.initial);
        const SeparationReport rep = separation_report(traj, Potential::make_regular());
        CHECK(std::isinf(rep.margin));
    }

    SUBCASE("phi identically zero: margin 1 under the logarithmic potential") {
        Trajectory traj;
        traj.params = p.params;
        traj.states.push_back(
            StateTriple{Field(p.grid(), 0.0), Field(p.grid(), 0.0), Field(p.grid(), 0.0)});
        const SeparationReport rep = separation_report(traj, p.params.potential);
        CHECK(rep.margin == doctest::Approx(1.0));
    }

    SUBCASE("desk-scale logarithmic run keeps a positive margin at every step") {
        const ControlTrajectory u(p.grid(), p.params.nt, 0.5);
        const Trajectory traj = solve_state(p.initial, u, p.params);
        for (const StepStats& st : traj.step_stats) {
            CHECK(st.phi_min - p.params.potential.r_minus() > 0.0);
            CHECK(p.params.potential.r_plus() - st.phi_max > 0.0);
        }
        CHECK(separation_report(traj, p.params.potential).margin > 0.0);
    }
}

TEST_CASE("first-order convergence in dt against a dt/16 reference") {
    const Grid g = grid1d(16);
    ModelParams params;
    params.t_final = 0.2;
    StateTriple init{Field(g, 0.0), cosine_field(g, 0.3, {1, 0, 0}), Field(g, 0.5)};

    auto run = [&](int nt) {
        ModelParams pnt = params;
        pnt.nt = nt;
        const ControlTrajectory u(g, nt, 0.2);
        return solve_state(init, u, pnt);
    };

    const Trajectory ref = run(32 * 16);
    std::vector<double> dts, errs;
    for (int nt : {8, 16, 32}) {
        const Trajectory t = run(nt);
        const StateTriple& a = t.final();
        const StateTriple& b = ref.final();
        const double err = std::sqrt(std::pow(l2_norm(a.mu - b.mu), 2) +
                                     std::pow(l2_norm(a.phi - b.phi), 2) +
                                     std::pow(l2_norm(a.sigma - b.sigma), 2));
        dts.push_back(params.t_final / nt);
        errs.push_back(err);
    }
    const double slope = loglog_slope(dts, errs);
    CHECK(slope > 0.8);
    CHECK(slope < 1.2);
}

TEST_CASE("2D run: mass ledger and separation behave as in 1D") {
    const Grid g = build_grid(2, std::array<int, 2>{12, 12}, std::array<double, 2>{1.0, 1.0});
    ModelParams params;
    params.t_final = 0.05;
    params.nt = 10;
    StateTriple init{Field(g, 0.0), cosine_field(g, 0.25, {1, 1, 0}), Field(g, 0.5)};
    const ControlTrajectory u(g, params.nt, 0.3);
    const Trajectory traj = solve_state(init, u, params);
    for (double r : mass_ledger(traj, u))
        CHECK(r <= 10.0 * params.newton.tol * g.measure());
    CHECK(separation_report(traj, params.potential).margin > 0.0);
}

TEST_CASE("stepping from outside the potential domain raises the separation signal") {
    ControlProblem p = desk_problem();
    p.initial.phi = Field(p.grid(), 1.5);  // outside (-1, 1)
    const ControlTrajectory u(p.grid(), p.params.nt, 0.0);
    CHECK_THROWS_AS(solve_state(p.initial, u, p.params), DomainViolation);
}
