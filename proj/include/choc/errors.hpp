#pragma once

#include <stdexcept>
#include <string>

namespace choc {

/// Invalid configuration (bad grid spec, unknown config key, violated hypothesis).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched grids / incompatible shapes between fields or trajectories.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation of a singular potential at or beyond its domain boundary.
/// Carries the offending point and the violated bound; this is the
/// separation monitor's signal.
class DomainViolation : public std::runtime_error {
public:
    DomainViolation(const std::string& what, double r, double bound)
        : std::runtime_error(what), r(r), bound(bound) {}
    double r;
    double bound;
};

/// Iterative solver failure (Newton or Krylov). Carries the last residual norm.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int time_index = -1)
        : std::runtime_error(what), residual(residual), time_index(time_index) {}
    double residual;
    int time_index;  // -1 when not tied to a time step
};

/// Filesystem / serialization failure, annotated with the path.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace choc
