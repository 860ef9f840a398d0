#include "choc/potentials.hpp"

#include <cmath>

namespace choc {

namespace {
// Evaluation guard strictly inside the open domain. Clamping instead would
// silently mask separation failures the stepping must detect.
constexpr double kEvalGuard = 1e-12;
}  // namespace

Potential Potential::make_regular() {
    Potential p;
    p.kind_ = Kind::regular;
    p.name_ = "regular";
    return p;
}

Potential Potential::make_logarithmic(double k) {
    if (k < 0.0) throw ConfigError("logarithmic potential: k must be >= 0");
    Potential p;
    p.kind_ = Kind::logarithmic;
    p.k_ = k;
    p.r_minus_ = -1.0;
    p.r_plus_ = 1.0;
    p.name_ = "logarithmic";
    return p;
}

Potential Potential::make_custom(std::function<double(double, int)> eval,
                                 std::function<PotentialSplit(double)> split,
                                 double r_minus, double r_plus, const std::string& name) {
    if (!(r_minus < 0.0 && 0.0 < r_plus))
        throw ConfigError("custom potential: domain must satisfy r_minus < 0 < r_plus");
    Potential p;
    p.kind_ = Kind::custom;
    p.custom_eval_ = std::move(eval);
    p.custom_split_ = std::move(split);
    p.r_minus_ = r_minus;
    p.r_plus_ = r_plus;
    p.name_ = name;

    // Load-time self-test: derivative consistency by central differences on a
    // few interior points, and B(0) = 0.
    const double lo = std::isfinite(r_minus) ? 0.8 * r_minus : -0.8;
    const double hi = std::isfinite(r_plus) ? 0.8 * r_plus : 0.8;
    const double eps = 1e-5;
    for (int s = 0; s <= 8; ++s) {
        const double r = lo + (hi - lo) * s / 8.0;
        for (int m = 0; m <= 2; ++m) {
            const double fd =
                (p.custom_eval_(r + eps, m) - p.custom_eval_(r - eps, m)) / (2.0 * eps);
            const double ex = p.custom_eval_(r, m + 1);
            const double scale = std::max({1.0, std::abs(fd), std::abs(ex)});
            if (std::abs(fd - ex) > 1e-6 * scale)
                throw ConfigError("custom potential '" + name +
                                  "' failed the derivative self-test at order " +
                                  std::to_string(m));
        }
    }
    if (std::abs(p.custom_split_(0.0).B) > 1e-12)
        throw ConfigError("custom potential '" + name + "' violates B(0) = 0");
    return p;
}

void Potential::check_domain(double r) const {
    if (r <= r_minus_ + kEvalGuard)
        throw DomainViolation("potential evaluated at r = " + std::to_string(r) +
                                  " at or below domain bound r_minus",
                              r, r_minus_);
    if (r >= r_plus_ - kEvalGuard)
        throw DomainViolation("potential evaluated at r = " + std::to_string(r) +
                                  " at or above domain bound r_plus",
                              r, r_plus_);
}

double Potential::eval_F(double r, int order) const {
    if (order < 0 || order > 3) throw ConfigError("eval_F: order must be in 0..3");
    switch (kind_) {
        case Kind::regular: {
            const double r2 = r * r;
            switch (order) {
                case 0: return 0.25 * (r2 - 1.0) * (r2 - 1.0);
                case 1: return r2 * r - r;
                case 2: return 3.0 * r2 - 1.0;
                default: return 6.0 * r;
            }
        }
        case Kind::logarithmic: {
            check_domain(r);
            const double om = 1.0 - r, op = 1.0 + r;
            switch (order) {
                case 0: return om * std::log(om) + op * std::log(op) - k_ * r * r;
                case 1: return std::log(op / om) - 2.0 * k_ * r;
                case 2: return 2.0 / (om * op) - 2.0 * k_;
                default: {
                    const double d = om * op;
                    return 4.0 * r / (d * d);
                }
            }
        }
        case Kind::custom:
            check_domain(r);
            return custom_eval_(r, order);
    }
    return 0.0;  // unreachable
}

PotentialSplit Potential::split(double r) const {
    switch (kind_) {
        case Kind::regular: {
            // Bhat = r^4/4, pihat = -(2r^2-1)/4.
            PotentialSplit s;
            s.Bhat = 0.25 * r * r * r * r;
            s.B = r * r * r;
            s.pi = -r;
            s.pi_prime = -1.0;
            return s;
        }
        case Kind::logarithmic: {
            check_domain(r);
            const double om = 1.0 - r, op = 1.0 + r;
            PotentialSplit s;
            s.Bhat = om * std::log(om) + op * std::log(op);
            s.B = std::log(op / om);
            s.pi = -2.0 * k_ * r;
            s.pi_prime = -2.0 * k_;
            return s;
        }
        case Kind::custom:
            check_domain(r);
            return custom_split_(r);
    }
    return {};  // unreachable
}

Proliferation Proliferation::make_constant(double p0) {
    if (p0 < 0.0) throw ConfigError("proliferation: p0 must be >= 0");
    Proliferation p;
    p.kind_ = Kind::constant;
    p.p0_ = p0;
    p.s_ = 0.0;
    return p;
}

Proliferation Proliferation::make_sigmoid(double p0, double s) {
    if (p0 < 0.0) throw ConfigError("proliferation: p0 must be >= 0");
    if (!(s > 0.0)) throw ConfigError("proliferation: steepness must be > 0");
    Proliferation p;
    p.kind_ = Kind::sigmoid;
    p.p0_ = p0;
    p.s_ = s;
    return p;
}

double Proliferation::eval(double r, int order) const {
    if (order < 0 || order > 2) throw ConfigError("eval_P: order must be in 0..2");
    if (kind_ == Kind::constant) return order == 0 ? p0_ : 0.0;
    // Stable logistic: q = P/p0 in (0,1).
    const double q = r >= 0.0 ? 1.0 / (1.0 + std::exp(-s_ * r))
                              : std::exp(s_ * r) / (1.0 + std::exp(s_ * r));
    switch (order) {
        case 0: return p0_ * q;
        case 1: return p0_ * s_ * q * (1.0 - q);
        default: return p0_ * s_ * s_ * q * (1.0 - q) * (1.0 - 2.0 * q);
    }
}

}  // namespace choc
