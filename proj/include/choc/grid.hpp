#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "choc/errors.hpp"

namespace choc {

/// Uniform cell-centered rectangular mesh on Omega = prod_a (0, L_a),
/// d = 1, 2 or 3. Cell i along axis a is centered at (i + 1/2) * h_a.
/// Homogeneous Neumann conditions are realized by mirrored ghost cells,
/// which keeps the discrete Laplacian exactly conservative.
struct Grid {
    int dim = 1;
    std::array<int, 3> n{1, 1, 1};                 // cells per axis (1 on unused axes)
    std::array<double, 3> lengths{1.0, 1.0, 1.0};  // side lengths (1 on unused axes)
    std::array<double, 3> h{1.0, 1.0, 1.0};        // cell sizes
    double cell_volume = 1.0;

    std::size_t size() const {
        return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
               static_cast<std::size_t>(n[2]);
    }
    double measure() const { return lengths[0] * lengths[1] * lengths[2]; }

    std::size_t index(int i, int j = 0, int k = 0) const {
        return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
    }
    /// Cell-center coordinate along axis a.
    double coord(int cell, int axis) const { return (cell + 0.5) * h[axis]; }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && lengths == o.lengths;
    }
};

/// Scalar function sampled at cell centers. Value semantics; public
/// operations return new fields and never leave NaN/Inf behind.
class Field {
public:
    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0)
        : grid_(g), v_(g.size(), fill) {}
    Field(const Grid& g, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }

    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }

    std::span<double> values() { return v_; }
    std::span<const double> values() const { return v_; }

    bool all_finite() const;

private:
    Grid grid_;
    std::vector<double> v_;
};

/// dim in {1,2,3}, every n >= 2, every length > 0; throws ConfigError otherwise.
Grid build_grid(int dim, std::span<const int> n_per_axis, std::span<const double> lengths);

/// Second-order Neumann Laplacian (mirrored ghost cells).
Field laplacian(const Field& f);

/// Discrete L2 inner product: cell_volume * sum f_i g_i. Grids must match.
double inner(const Field& f, const Field& g);

double l2_norm(const Field& f);

/// Squared H1 seminorm: sum over interior faces of ((f_j - f_i)/h)^2 * cell_volume.
double h1_seminorm_sq(const Field& f);

/// Generalized mean value (1/|Omega|) <f, 1>.
double mean_value(const Field& f);

/// Riesz operator A = -Laplacian + I.
Field apply_riesz(const Field& f);

struct RieszSolveOptions {
    double rel_tol = 1e-10;
    int max_iter_factor = 10;  // max iterations = factor * N
};

/// A^{-1} f by Jacobi-preconditioned conjugate gradient. Throws SolverError
/// with the residual norm on non-convergence.
Field solve_riesz(const Field& f, const RieszSolveOptions& opts = {});

/// V* dual norm sqrt(<f, A^{-1} f>).
double dual_norm(const Field& f);

// Elementwise helpers. All check grid compatibility.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field& operator+=(Field& a, const Field& b);
Field& operator-=(Field& a, const Field& b);
void axpy(double s, const Field& x, Field& y);  // y += s*x

double min_value(const Field& f);
double max_value(const Field& f);

/// amp * prod_a cos(k_a pi x_a / L_a); modes beyond grid.dim are ignored.
Field cosine_field(const Grid& g, double amp, std::array<int, 3> modes);

Field constant_field(const Grid& g, double c);

void require_same_grid(const Field& a, const Field& b, const char* where);

}  // namespace choc
