#include "choc/cost.hpp"

namespace choc {

bool ControlBox::contains(const ControlTrajectory& u, double slack) const {
    for (int n = 1; n <= u.nt(); ++n) {
        const auto v = u.at(n).values();
        const auto lo = lower.values();
        const auto hi = upper.values();
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] < lo[i] - slack || v[i] > hi[i] + slack) return false;
    }
    return true;
}

Field misfit(const Field& y, const TimeTarget& target, int node) {
    if (target.empty()) return y;
    return y - target.at(node);
}

Field misfit_terminal(const Field& y, const std::optional<Field>& target) {
    if (!target) return y;
    return y - *target;
}

CostBreakdown evaluate_cost(const Trajectory& traj, const ControlTrajectory& u,
                            const CostSpec& cost) {
    const int nt = traj.nt();
    if (u.nt() != nt) throw ShapeError("evaluate_cost: control/trajectory length mismatch");
    const double dt = traj.params.dt();
    CostBreakdown out;

    for (int n = 1; n <= nt; ++n) {
        const StateTriple& s = traj.at(n);
        if (cost.b1 != 0.0) {
            const Field d = misfit(s.phi, cost.phi_q, n);
            out.j_b1 += 0.5 * cost.b1 * dt * inner(d, d);
        }
        if (cost.b3 != 0.0) {
            const Field d = misfit(s.sigma, cost.sigma_q, n);
            out.j_b3 += 0.5 * cost.b3 * dt * inner(d, d);
        }
        if (cost.b5 != 0.0) {
            const Field d = misfit(s.mu, cost.mu_q, n);
            out.j_b5 += 0.5 * cost.b5 * dt * inner(d, d);
        }
        if (cost.b0 != 0.0) out.j_b0 += 0.5 * cost.b0 * dt * inner(u.at(n), u.at(n));
    }
    const StateTriple& fin = traj.final();
    if (cost.b2 != 0.0) {
        const Field d = misfit_terminal(fin.phi, cost.phi_omega);
        out.j_b2 = 0.5 * cost.b2 * inner(d, d);
    }
    if (cost.b4 != 0.0) {
        const Field d = misfit_terminal(fin.sigma, cost.sigma_omega);
        out.j_b4 = 0.5 * cost.b4 * inner(d, d);
    }
    if (cost.b6 != 0.0) {
        const Field d = misfit_terminal(fin.mu, cost.mu_omega);
        out.j_b6 = 0.5 * cost.b6 * inner(d, d);
    }
    out.total = out.j_b0 + out.j_b1 + out.j_b2 + out.j_b3 + out.j_b4 + out.j_b5 + out.j_b6;
    return out;
}

}  // namespace choc
