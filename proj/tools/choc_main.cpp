#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "choc/config.hpp"
#include "choc/io.hpp"
#include "choc/optimize.hpp"
#include "choc/sensitivity.hpp"
#include "choc/state_solver.hpp"
#include "choc/verify.hpp"

namespace {

using namespace choc;

constexpr int kExitOk = 0;
constexpr int kExitSolverError = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitCheckFailed = 3;

std::string out_path(const RunSpec& spec, const std::string& name) {
    std::filesystem::create_directories(spec.output_dir);
    return (std::filesystem::path(spec.output_dir) / name).string();
}

int cmd_simulate(const RunSpec& spec) {
    const Trajectory traj = solve_state(spec.problem.initial, spec.u_init, spec.problem.params);
    const auto rows = timeseries_rows(traj, spec.u_init, spec.problem.cost);
    write_timeseries(rows, out_path(spec, "timeseries.csv"));
    const StateTriple& fin = traj.final();
    write_snapshot(std::array<Field, 3>{fin.mu, fin.phi, fin.sigma},
                   out_path(spec, "state_final.chcf"));
    const SeparationReport sep = separation_report(traj, spec.problem.params.potential);
    std::cout << "simulate: " << traj.nt() << " steps, J_total(final row) = "
              << rows.back().j_total << ", separation margin = " << sep.margin << "\n";
    return kExitOk;
}

int cmd_linearize(const RunSpec& spec) {
    const Trajectory base =
        solve_state(spec.problem.initial, spec.u_init, spec.problem.params);
    const LinearizedTrajectory lin = solve_linearized(base, spec.direction, spec.problem.params);
    const int nt = lin.nt();
    write_snapshot(std::array<Field, 3>{lin.eta[nt], lin.theta[nt], lin.rho[nt]},
                   out_path(spec, "linearized_final.chcf"));
    std::cout << "linearize: final-node norms |eta| = " << l2_norm(lin.eta[nt])
              << ", |theta| = " << l2_norm(lin.theta[nt]) << ", |rho| = " << l2_norm(lin.rho[nt])
              << "\n";
    return kExitOk;
}

int cmd_adjoint(const RunSpec& spec) {
    const Trajectory base =
        solve_state(spec.problem.initial, spec.u_init, spec.problem.params);
    const AdjointTrajectory adj =
        solve_adjoint(base, spec.problem.cost, spec.problem.params);
    write_snapshot(std::array<Field, 3>{adj.q[0], adj.p[0], adj.r[0]},
                   out_path(spec, "adjoint_node0.chcf"));
    write_snapshot(
        std::array<Field, 6>{adj.terminal.q_T, adj.terminal.p_T, adj.terminal.r_T,
                             adj.terminal.source_mu, adj.terminal.source_phi,
                             adj.terminal.source_sigma},
        out_path(spec, "adjoint_terminal_record.chcf"));
    std::cout << "adjoint: terminal |q_T| = " << l2_norm(adj.terminal.q_T)
              << ", |p_T| = " << l2_norm(adj.terminal.p_T)
              << ", |r_T| = " << l2_norm(adj.terminal.r_T) << "\n";
    return kExitOk;
}

int cmd_optimize(const RunSpec& spec) {
    const OptimizationResult res =
        projected_gradient_descent(spec.u_init, spec.problem, spec.optimizer);
    write_snapshot(res.u_opt.fields(), out_path(spec, "control_optimal.chcf"));
    {
        std::ofstream os(out_path(spec, "optimize_history.csv"));
        os << "iter,cost,stationarity\n";
        os.precision(17);
        for (std::size_t i = 0; i < res.cost_history.size(); ++i) {
            os << i << ',' << res.cost_history[i] << ',';
            if (i < res.stationarity_history.size()) os << res.stationarity_history[i];
            os << '\n';
        }
    }
    std::cout << "optimize: " << to_string(res.termination) << " after " << res.iterations
              << " iterations, J = " << res.cost_history.back()
              << ", stationarity = " << res.stationarity_history.back();
    if (res.degenerate_b0)
        std::cout << " (b0 = 0: gradient is the adjoint r alone; the problem may be degenerate)";
    std::cout << "\n";
    return kExitOk;
}

int cmd_check(const RunSpec& spec, unsigned long long seed) {
    const auto reports = run_all_checks(spec.problem, seed);
    std::ofstream os(out_path(spec, "check_report.txt"));
    bool all_pass = true;
    for (const auto& r : reports) {
        const std::string line = to_line(r);
        std::cout << line << "\n";
        os << line << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "all checks passed" : "CHECK FAILURES present") << "\n";
    return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"choc - optimal control of a Cahn-Hilliard tumor growth system"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    unsigned long long seed = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "path to the run configuration")->required();
        cmd->add_option("--output", output_override, "override [output] dir");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "forward solve: time series + snapshot");
    CLI::App* linearize = app.add_subcommand("linearize", "sensitivity solve for [control] direction");
    CLI::App* adjoint = app.add_subcommand("adjoint", "backward solve + terminal-condition record");
    CLI::App* optimize = app.add_subcommand("optimize", "projected gradient descent");
    CLI::App* check = app.add_subcommand("check", "run the verification battery");
    for (CLI::App* cmd : {simulate, linearize, adjoint, optimize, check}) add_common(cmd);
    check->add_option("--seed", seed, "seed for the check battery")
        ->each([&seed_given](const std::string&) { seed_given = true; });

    CLI11_PARSE(app, argc, argv);

    RunSpec spec;
    try {
        spec = parse_config(config_path);
        if (!output_override.empty()) spec.output_dir = output_override;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const IoError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(spec);
        if (linearize->parsed()) return cmd_linearize(spec);
        if (adjoint->parsed()) return cmd_adjoint(spec);
        if (optimize->parsed()) return cmd_optimize(spec);
        if (check->parsed()) return cmd_check(spec, seed_given ? seed : spec.seed);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolverError;
    }
    return kExitOk;
}
