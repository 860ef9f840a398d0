#include "choc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace choc {

Field::Field(const Grid& g, std::vector<double> values)
    : grid_(g), v_(std::move(values)) {
    if (v_.size() != g.size())
        throw ShapeError("Field: value count " + std::to_string(v_.size()) +
                         " does not match grid size " + std::to_string(g.size()));
}

bool Field::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

Grid build_grid(int dim, std::span<const int> n_per_axis, std::span<const double> lengths) {
    if (dim < 1 || dim > 3)
        throw ConfigError("build_grid: dim must be 1, 2 or 3, got " + std::to_string(dim));
    if (static_cast<int>(n_per_axis.size()) != dim || static_cast<int>(lengths.size()) != dim)
        throw ConfigError("build_grid: expected " + std::to_string(dim) +
                          " entries for n_per_axis and lengths");
    Grid g;
    g.dim = dim;
    g.cell_volume = 1.0;
    for (int a = 0; a < dim; ++a) {
        if (n_per_axis[a] < 2)
            throw ConfigError("build_grid: n_per_axis[" + std::to_string(a) +
                              "] must be >= 2, got " + std::to_string(n_per_axis[a]));
        if (!(lengths[a] > 0.0))
            throw ConfigError("build_grid: lengths[" + std::to_string(a) + "] must be > 0");
        g.n[a] = n_per_axis[a];
        g.lengths[a] = lengths[a];
        g.h[a] = lengths[a] / n_per_axis[a];
        g.cell_volume *= g.h[a];
    }
    return g;
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (!(a.grid() == b.grid()))
        throw ShapeError(std::string(where) + ": fields live on different grids");
}

Field laplacian(const Field& f) {
    const Grid& g = f.grid();
    Field out(g, 0.0);
    const auto v = f.values();
    auto o = out.values();
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    const double ix2 = 1.0 / (g.h[0] * g.h[0]);
    const double iy2 = g.dim >= 2 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
    const double iz2 = g.dim >= 3 ? 1.0 / (g.h[2] * g.h[2]) : 0.0;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = g.index(i, j, k);
                const double fc = v[c];
                // Mirrored ghosts: the boundary flux vanishes term by term,
                // so constants map to exact zeros.
                double acc = 0.0;
                {
                    const double fm = (i > 0) ? v[c - 1] : fc;
                    const double fp = (i < nx - 1) ? v[c + 1] : fc;
                    acc += ((fm - fc) + (fp - fc)) * ix2;
                }
                if (g.dim >= 2) {
                    const double fm = (j > 0) ? v[c - nx] : fc;
                    const double fp = (j < ny - 1) ? v[c + nx] : fc;
                    acc += ((fm - fc) + (fp - fc)) * iy2;
                }
                if (g.dim >= 3) {
                    const std::size_t stride = static_cast<std::size_t>(nx) * ny;
                    const double fm = (k > 0) ? v[c - stride] : fc;
                    const double fp = (k < nz - 1) ? v[c + stride] : fc;
                    acc += ((fm - fc) + (fp - fc)) * iz2;
                }
                o[c] = acc;
            }
        }
    }
    return out;
}

double inner(const Field& f, const Field& g) {
    require_same_grid(f, g, "inner");
    const auto a = f.values();
    const auto b = g.values();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * f.grid().cell_volume;
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

double h1_seminorm_sq(const Field& f) {
    const Grid& g = f.grid();
    const auto v = f.values();
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    double s = 0.0;
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = g.index(i, j, k);
                if (i + 1 < nx) {
                    const double d = (v[c + 1] - v[c]) / g.h[0];
                    s += d * d;
                }
                if (g.dim >= 2 && j + 1 < ny) {
                    const double d = (v[c + nx] - v[c]) / g.h[1];
                    s += d * d;
                }
                if (g.dim >= 3 && k + 1 < nz) {
                    const double d = (v[c + static_cast<std::size_t>(nx) * ny] - v[c]) / g.h[2];
                    s += d * d;
                }
            }
        }
    }
    return s * g.cell_volume;
}

double mean_value(const Field& f) {
    const auto v = f.values();
    double s = 0.0;
    for (double x : v) s += x;
    return s * f.grid().cell_volume / f.grid().measure();
}

Field apply_riesz(const Field& f) {
    Field out = laplacian(f);
    auto o = out.values();
    const auto v = f.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = v[i] - o[i];
    return out;
}

Field solve_riesz(const Field& f, const RieszSolveOptions& opts) {
    // CG on A = I - Laplacian (SPD, spectrum >= 1), Jacobi preconditioned.
    const Grid& g = f.grid();
    const std::size_t n = g.size();
    const auto b = f.values();

    double bnorm = 0.0;
    for (double x : b) bnorm += x * x;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return Field(g, 0.0);

    // Diagonal of A: 1 + sum over axes of (#actual neighbors)/h^2.
    Field diag(g, 0.0);
    {
        auto d = diag.values();
        const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    double v = 1.0;
                    v += ((i > 0) + (i < nx - 1)) / (g.h[0] * g.h[0]);
                    if (g.dim >= 2) v += ((j > 0) + (j < ny - 1)) / (g.h[1] * g.h[1]);
                    if (g.dim >= 3) v += ((k > 0) + (k < nz - 1)) / (g.h[2] * g.h[2]);
                    d[g.index(i, j, k)] = v;
                }
    }

    Field x(g, 0.0);
    Field r = f;  // r = b - A*0
    Field z(g, 0.0);
    auto precond = [&](const Field& rr, Field& zz) {
        const auto d = diag.values();
        const auto rv = rr.values();
        auto zv = zz.values();
        for (std::size_t i = 0; i < n; ++i) zv[i] = rv[i] / d[i];
    };
    precond(r, z);
    Field p = z;
    double rz = inner(r, z);

    const int max_iter = opts.max_iter_factor * static_cast<int>(n);
    double rnorm = bnorm;
    for (int it = 0; it < max_iter; ++it) {
        Field ap = apply_riesz(p);
        const double pap = inner(p, ap);
        const double alpha = rz / pap;
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        rnorm = 0.0;
        for (double v : r.values()) rnorm += v * v;
        rnorm = std::sqrt(rnorm);
        if (rnorm <= opts.rel_tol * bnorm) return x;
        precond(r, z);
        const double rz_new = inner(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        auto pv = p.values();
        const auto zv = z.values();
        for (std::size_t i = 0; i < n; ++i) pv[i] = zv[i] + beta * pv[i];
    }
    throw SolverError("solve_riesz: CG did not converge", rnorm / bnorm);
}

double dual_norm(const Field& f) {
    const double v = inner(f, solve_riesz(f));
    return std::sqrt(std::max(v, 0.0));
}

Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b, "operator+");
    Field out = a;
    auto o = out.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += bv[i];
    return out;
}

Field operator-(const Field& a, const Field& b) {
    require_same_grid(a, b, "operator-");
    Field out = a;
    auto o = out.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bv[i];
    return out;
}

Field operator*(double s, const Field& a) {
    Field out = a;
    for (auto& v : out.values()) v *= s;
    return out;
}

Field& operator+=(Field& a, const Field& b) {
    require_same_grid(a, b, "operator+=");
    auto o = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += bv[i];
    return a;
}

Field& operator-=(Field& a, const Field& b) {
    require_same_grid(a, b, "operator-=");
    auto o = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bv[i];
    return a;
}

void axpy(double s, const Field& x, Field& y) {
    require_same_grid(x, y, "axpy");
    auto o = y.values();
    const auto xv = x.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += s * xv[i];
}

double min_value(const Field& f) {
    return *std::min_element(f.values().begin(), f.values().end());
}

double max_value(const Field& f) {
    return *std::max_element(f.values().begin(), f.values().end());
}

Field cosine_field(const Grid& g, double amp, std::array<int, 3> modes) {
    Field out(g, 0.0);
    auto o = out.values();
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                double v = amp;
                v *= std::cos(modes[0] * std::numbers::pi * g.coord(i, 0) / g.lengths[0]);
                if (g.dim >= 2)
                    v *= std::cos(modes[1] * std::numbers::pi * g.coord(j, 1) / g.lengths[1]);
                if (g.dim >= 3)
                    v *= std::cos(modes[2] * std::numbers::pi * g.coord(k, 2) / g.lengths[2]);
                o[g.index(i, j, k)] = v;
            }
    return out;
}

Field constant_field(const Grid& g, double c) { return Field(g, c); }

}  // namespace choc
