#pragma once

#include <optional>
#include <vector>

#include "choc/model.hpp"

namespace choc {

/// Tracking target over time: either one field (constant in time) or one
/// field per node 0..nt.
class TimeTarget {
public:
    TimeTarget() = default;
    explicit TimeTarget(Field constant) : fields_{std::move(constant)} {}
    explicit TimeTarget(std::vector<Field> per_node) : fields_(std::move(per_node)) {}

    bool empty() const { return fields_.empty(); }
    const Field& at(int node) const {
        return fields_.size() == 1 ? fields_[0] : fields_[static_cast<std::size_t>(node)];
    }

private:
    std::vector<Field> fields_;
};

/// Cost weights and targets. b0..b4 are the tracking-type functional's
/// weights; b5, b6 extend it with mu tracking.
struct CostSpec {
    double b0 = 0.0;  // control cost
    double b1 = 0.0;  // phi tracking over Q
    double b2 = 0.0;  // phi(T) tracking
    double b3 = 0.0;  // sigma tracking over Q
    double b4 = 0.0;  // sigma(T) tracking
    double b5 = 0.0;  // mu tracking over Q
    double b6 = 0.0;  // mu(T) tracking

    TimeTarget phi_q, sigma_q, mu_q;          // distributed targets
    std::optional<Field> phi_omega, sigma_omega, mu_omega;  // terminal targets

    bool all_weights_zero() const {
        return b0 == 0.0 && b1 == 0.0 && b2 == 0.0 && b3 == 0.0 && b4 == 0.0 && b5 == 0.0 &&
               b6 == 0.0;
    }
};

/// Box of admissible controls u_* <= u <= u^* (spatial bounds, constant in time).
struct ControlBox {
    Field lower, upper;

    bool contains(const ControlTrajectory& u, double slack = 0.0) const;
};

/// The full control problem: dynamics, cost, admissible box, initial data.
struct ControlProblem {
    ModelParams params;
    CostSpec cost;
    ControlBox box;
    StateTriple initial;

    const Grid& grid() const { return initial.phi.grid(); }
};

struct CostBreakdown {
    double total = 0.0;
    double j_b0 = 0.0, j_b1 = 0.0, j_b2 = 0.0, j_b3 = 0.0, j_b4 = 0.0, j_b5 = 0.0, j_b6 = 0.0;
};

/// Discrete cost: Q-integrals by the right-rectangle rule over nodes 1..nt,
/// terminal terms at node nt.
CostBreakdown evaluate_cost(const Trajectory& traj, const ControlTrajectory& u,
                            const CostSpec& cost);

/// Misfit y - target at a node, or a zero field when no target was given.
Field misfit(const Field& y, const TimeTarget& target, int node);
Field misfit_terminal(const Field& y, const std::optional<Field>& target);

}  // namespace choc
