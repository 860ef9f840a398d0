#include "choc/linear_ops.hpp"

#include <cmath>
#include <cstring>

#include "choc/errors.hpp"

namespace choc {

StepJacobian StepJacobian::at(const StateTriple& point, const ModelParams& p) {
    StepJacobian j;
    j.grid = point.phi.grid();
    j.alpha = p.alpha;
    j.beta = p.beta;
    j.dt = p.dt();
    j.pbar = Field(j.grid, 0.0);
    j.psm = Field(j.grid, 0.0);
    j.fpp = Field(j.grid, 0.0);
    const auto phi = point.phi.values();
    const auto mu = point.mu.values();
    const auto sig = point.sigma.values();
    auto pb = j.pbar.values();
    auto ps = j.psm.values();
    auto fp = j.fpp.values();
    for (std::size_t i = 0; i < phi.size(); ++i) {
        pb[i] = p.prolif.eval(phi[i], 0);
        ps[i] = p.prolif.eval(phi[i], 1) * (sig[i] - mu[i]);
        fp[i] = p.potential.eval_F(phi[i], 2);
    }
    return j;
}

namespace {

// y = Laplacian(x) for one stacked component, written against raw spans to
// avoid Field temporaries in the hot loop.
void lap_span(const Grid& g, std::span<const double> v, std::span<double> o) {
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    const double ix2 = 1.0 / (g.h[0] * g.h[0]);
    const double iy2 = g.dim >= 2 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
    const double iz2 = g.dim >= 3 ? 1.0 / (g.h[2] * g.h[2]) : 0.0;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = g.index(i, j, k);
                const double fc = v[c];
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

double lap_diagonal(const Grid& g, int i, int j, int k) {
    double d = -((i > 0) + (i < g.n[0] - 1)) / (g.h[0] * g.h[0]);
    if (g.dim >= 2) d += -((j > 0) + (j < g.n[1] - 1)) / (g.h[1] * g.h[1]);
    if (g.dim >= 3) d += -((k > 0) + (k < g.n[2] - 1)) / (g.h[2] * g.h[2]);
    return d;
}

}  // namespace

void StepJacobian::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t N = n();
    const auto xm = x.subspan(0, N), xp = x.subspan(N, N), xs = x.subspan(2 * N, N);
    auto ym = y.subspan(0, N), yp = y.subspan(N, N), ys = y.subspan(2 * N, N);

    std::vector<double> lm(N), lp(N), ls(N);
    lap_span(grid, xm, lm);
    lap_span(grid, xp, lp);
    lap_span(grid, xs, ls);

    const auto pb = pbar.values();
    const auto ps = psm.values();
    const auto fp = fpp.values();
    const double idt = 1.0 / dt;
    for (std::size_t i = 0; i < N; ++i) {
        ym[i] = (alpha * idt + pb[i]) * xm[i] - lm[i] + (idt - ps[i]) * xp[i] - pb[i] * xs[i];
        yp[i] = xm[i] + (-beta * idt - fp[i]) * xp[i] + lp[i];
        ys[i] = -pb[i] * xm[i] + ps[i] * xp[i] + (idt + pb[i]) * xs[i] - ls[i];
    }
}

void StepJacobian::apply_transpose(std::span<const double> x, std::span<double> y) const {
    // x = multipliers (p, q, r) against the three step equations; y lands in
    // state component order (mu, phi, sigma).
    const std::size_t N = n();
    const auto xa = x.subspan(0, N), xb = x.subspan(N, N), xc = x.subspan(2 * N, N);
    auto ym = y.subspan(0, N), yp = y.subspan(N, N), ys = y.subspan(2 * N, N);

    std::vector<double> la(N), lb(N), lc(N);
    lap_span(grid, xa, la);
    lap_span(grid, xb, lb);
    lap_span(grid, xc, lc);

    const auto pb = pbar.values();
    const auto ps = psm.values();
    const auto fp = fpp.values();
    const double idt = 1.0 / dt;
    for (std::size_t i = 0; i < N; ++i) {
        ym[i] = (alpha * idt + pb[i]) * xa[i] - la[i] + xb[i] - pb[i] * xc[i];
        yp[i] = (idt - ps[i]) * xa[i] + (-beta * idt - fp[i]) * xb[i] + lb[i] + ps[i] * xc[i];
        ys[i] = -pb[i] * xa[i] + (idt + pb[i]) * xc[i] - lc[i];
    }
}

std::vector<double> StepJacobian::diagonal() const {
    const std::size_t N = n();
    std::vector<double> d(3 * N);
    const auto pb = pbar.values();
    const auto fp = fpp.values();
    const double idt = 1.0 / dt;
    const int nx = grid.n[0], ny = grid.n[1], nz = grid.n[2];
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = grid.index(i, j, k);
                const double ld = lap_diagonal(grid, i, j, k);
                d[c] = alpha * idt + pb[c] - ld;
                d[N + c] = -beta * idt - fp[c] + ld;
                d[2 * N + c] = idt + pb[c] - ld;
            }
    return d;
}

void pack3(const Field& a, const Field& b, const Field& c, std::span<double> out) {
    const std::size_t N = a.size();
    std::memcpy(out.data(), a.values().data(), N * sizeof(double));
    std::memcpy(out.data() + N, b.values().data(), N * sizeof(double));
    std::memcpy(out.data() + 2 * N, c.values().data(), N * sizeof(double));
}

void unpack3(std::span<const double> in, Field& a, Field& b, Field& c) {
    const std::size_t N = a.size();
    std::memcpy(a.values().data(), in.data(), N * sizeof(double));
    std::memcpy(b.values().data(), in.data() + N, N * sizeof(double));
    std::memcpy(c.values().data(), in.data() + 2 * N, N * sizeof(double));
}

double stacked_l2(std::span<const double> x, double cell_volume) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s * cell_volume);
}

namespace {
double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
double nrm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }
}  // namespace

KrylovResult bicgstab(const std::function<void(std::span<const double>, std::span<double>)>& op,
                      std::span<const double> rhs, std::span<double> x,
                      std::span<const double> diag, const LinearSolverOptions& opts) {
    const std::size_t n = rhs.size();
    const double bnorm = nrm2(rhs);
    std::fill(x.begin(), x.end(), 0.0);
    if (bnorm == 0.0) return {0, 0.0};

    auto prec = [&](std::span<const double> v, std::span<double> out) {
        for (std::size_t i = 0; i < n; ++i) out[i] = v[i] / diag[i];
    };

    std::vector<double> r(rhs.begin(), rhs.end());
    std::vector<double> r0 = r;
    std::vector<double> p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n), tmp(n);

    double rho_old = 1.0, alpha = 1.0, omega = 1.0;
    double rnorm = bnorm;
    const int max_iter = opts.max_iter_factor * static_cast<int>(std::sqrt(double(n))) + 200;

    for (int it = 1; it <= max_iter; ++it) {
        const double rho = dot(r0, r);
        if (rho == 0.0)
            throw SolverError("bicgstab: breakdown (rho = 0)", rnorm / bnorm);
        if (it == 1) {
            p = r;
        } else {
            const double beta = (rho / rho_old) * (alpha / omega);
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        prec(p, phat);
        op(phat, v);
        alpha = rho / dot(r0, v);
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        double snorm = nrm2(s);
        if (snorm <= opts.rel_tol * bnorm) {
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
            return {it, snorm / bnorm};
        }
        prec(s, shat);
        op(shat, t);
        const double tt = dot(t, t);
        if (tt == 0.0)
            throw SolverError("bicgstab: breakdown (t = 0)", snorm / bnorm);
        omega = dot(t, s) / tt;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        rnorm = nrm2(r);
        if (rnorm <= opts.rel_tol * bnorm) return {it, rnorm / bnorm};
        if (omega == 0.0)
            throw SolverError("bicgstab: breakdown (omega = 0)", rnorm / bnorm);
        rho_old = rho;
    }
    throw SolverError("bicgstab: no convergence within max iterations", rnorm / bnorm);
}

}  // namespace choc
