#pragma once

#include <vector>

#include "choc/grid.hpp"
#include "choc/potentials.hpp"

namespace choc {

struct NewtonOptions {
    double tol = 1e-11;     // contractual bound on the stacked residual L2 norm
    double floor = 1e-13;   // keep polishing toward this while progress is cheap
    int max_iter = 50;
    int max_halvings = 30;  // damping when a trial phi leaves the safe interior
};

struct LinearSolverOptions {
    double rel_tol = 1e-12;
    int max_iter_factor = 40;  // max iterations = factor * sqrt(N) + 200
};

struct ModelParams {
    double alpha = 0.5;  // relaxation in the mu equation
    double beta = 0.5;   // viscosity in the phi equation
    Potential potential = Potential::make_logarithmic(2.0);
    Proliferation prolif = Proliferation::make_sigmoid(1.0, 2.0);
    double t_final = 0.25;
    int nt = 50;

    NewtonOptions newton;
    LinearSolverOptions linear;

    double dt() const { return t_final / nt; }
};

/// One time node of the state: chemical potential mu, order parameter phi,
/// nutrient sigma.
struct StateTriple {
    Field mu, phi, sigma;
};

/// Per-step solver diagnostics.
struct StepStats {
    int newton_iters = 0;
    double residual = 0.0;
    double phi_min = 0.0;
    double phi_max = 0.0;
};

/// States at time nodes 0..nt; states[0] is the supplied initial data.
struct Trajectory {
    std::vector<StateTriple> states;
    std::vector<StepStats> step_stats;  // one per step 1..nt
    ModelParams params;

    int nt() const { return static_cast<int>(states.size()) - 1; }
    const StateTriple& at(int node) const { return states[static_cast<std::size_t>(node)]; }
    const StateTriple& final() const { return states.back(); }
};

/// Control samples at the right time nodes 1..nt; u is piecewise constant on
/// (t_{n-1}, t_n].
class ControlTrajectory {
public:
    ControlTrajectory() = default;
    ControlTrajectory(const Grid& g, int nt, double fill = 0.0)
        : fields_(static_cast<std::size_t>(nt), Field(g, fill)) {}
    explicit ControlTrajectory(std::vector<Field> fields) : fields_(std::move(fields)) {}

    int nt() const { return static_cast<int>(fields_.size()); }
    /// n in 1..nt.
    Field& at(int n) { return fields_[static_cast<std::size_t>(n - 1)]; }
    const Field& at(int n) const { return fields_[static_cast<std::size_t>(n - 1)]; }

    const std::vector<Field>& fields() const { return fields_; }
    std::vector<Field>& fields() { return fields_; }

private:
    std::vector<Field> fields_;
};

/// <u, v>_{L2(Q)} with the right-rectangle rule matching the scheme.
double inner_q(const ControlTrajectory& u, const ControlTrajectory& v, double dt);
double l2q_norm(const ControlTrajectory& u, double dt);

ControlTrajectory operator+(const ControlTrajectory& a, const ControlTrajectory& b);
ControlTrajectory operator-(const ControlTrajectory& a, const ControlTrajectory& b);
ControlTrajectory operator*(double s, const ControlTrajectory& a);

}  // namespace choc
