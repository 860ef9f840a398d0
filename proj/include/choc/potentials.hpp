#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "choc/errors.hpp"

namespace choc {

/// Split of the double-well potential F = Bhat + pihat evaluated at one point.
struct PotentialSplit {
    double Bhat;      // convex part
    double B;         // Bhat'
    double pi;        // pihat'
    double pi_prime;  // pihat''
};

/// Double-well potential F = Bhat + pihat with C^3 interior (r_minus, r_plus).
///
/// regular:      F(r) = (1/4)(r^2-1)^2 on all of R
/// logarithmic:  F(r) = (1-r)log(1-r) + (1+r)log(1+r) - k r^2 on (-1, 1)
/// custom:       user-supplied derivative table; must declare its domain and
///               pass the finite-difference self-test at construction.
class Potential {
public:
    enum class Kind { regular, logarithmic, custom };

    static Potential make_regular();
    /// k >= 0; the double well needs k > 1 (F''(0) = 2 - 2k < 0).
    static Potential make_logarithmic(double k = 2.0);
    /// eval(r, order) must supply orders 0..3 on (r_minus, r_plus).
    static Potential make_custom(std::function<double(double, int)> eval,
                                 std::function<PotentialSplit(double)> split,
                                 double r_minus, double r_plus,
                                 const std::string& name = "custom");

    Kind kind() const { return kind_; }
    double r_minus() const { return r_minus_; }
    double r_plus() const { return r_plus_; }
    double k() const { return k_; }
    /// Margin used by the solver's damping guard when keeping phi interior.
    double eps_domain() const { return eps_domain_; }
    void set_eps_domain(double e) {
        if (!(e > 0.0 && e < 0.5))
            throw ConfigError("potential: eps_domain must lie in (0, 0.5)");
        eps_domain_ = e;
    }

    /// F and derivatives, order in 0..3. Throws DomainViolation at or beyond
    /// the domain boundary (the separation monitor's signal).
    double eval_F(double r, int order) const;

    /// (Bhat, B, pi, pi') at r.
    PotentialSplit split(double r) const;

    bool bounded_domain() const { return std::isfinite(r_minus_) || std::isfinite(r_plus_); }

private:
    Potential() = default;
    void check_domain(double r) const;

    Kind kind_ = Kind::regular;
    double r_minus_ = -std::numeric_limits<double>::infinity();
    double r_plus_ = std::numeric_limits<double>::infinity();
    double k_ = 0.0;
    double eps_domain_ = 1e-9;
    std::function<double(double, int)> custom_eval_;
    std::function<PotentialSplit(double)> custom_split_;
    std::string name_ = "regular";
};

/// Proliferation function P: nonnegative, bounded, Lipschitz (H5).
///
/// constant:  P == p0
/// sigmoid:   P(r) = p0 / (1 + exp(-s r))
class Proliferation {
public:
    enum class Kind { constant, sigmoid };

    static Proliferation make_constant(double p0);
    static Proliferation make_sigmoid(double p0 = 1.0, double s = 2.0);

    Kind kind() const { return kind_; }
    double p0() const { return p0_; }
    double steepness() const { return s_; }

    /// P and derivatives, order in 0..2.
    double eval(double r, int order) const;

private:
    Kind kind_ = Kind::sigmoid;
    double p0_ = 1.0;
    double s_ = 2.0;
};

}  // namespace choc
