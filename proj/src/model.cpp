#include "choc/model.hpp"

#include <cmath>

namespace choc {

double inner_q(const ControlTrajectory& u, const ControlTrajectory& v, double dt) {
    if (u.nt() != v.nt()) throw ShapeError("inner_q: control lengths differ");
    double s = 0.0;
    for (int n = 1; n <= u.nt(); ++n) s += inner(u.at(n), v.at(n));
    return dt * s;
}

double l2q_norm(const ControlTrajectory& u, double dt) {
    return std::sqrt(std::max(inner_q(u, u, dt), 0.0));
}

ControlTrajectory operator+(const ControlTrajectory& a, const ControlTrajectory& b) {
    if (a.nt() != b.nt()) throw ShapeError("control +: lengths differ");
    ControlTrajectory out = a;
    for (int n = 1; n <= a.nt(); ++n) out.at(n) += b.at(n);
    return out;
}

ControlTrajectory operator-(const ControlTrajectory& a, const ControlTrajectory& b) {
    if (a.nt() != b.nt()) throw ShapeError("control -: lengths differ");
    ControlTrajectory out = a;
    for (int n = 1; n <= a.nt(); ++n) out.at(n) -= b.at(n);
    return out;
}

ControlTrajectory operator*(double s, const ControlTrajectory& a) {
    ControlTrajectory out = a;
    for (auto& f : out.fields())
        for (auto& v : f.values()) v *= s;
    return out;
}

}  // namespace choc
