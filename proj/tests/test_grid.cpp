#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "choc/grid.hpp"
#include "choc/rng.hpp"
#include "doctest.h"

using namespace choc;

namespace {
Grid grid1d(int n, double len = 1.0) {
    return build_grid(1, std::array<int, 1>{n}, std::array<double, 1>{len});
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log10(x[i]), ly = std::log10(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
}  // namespace

TEST_CASE("build_grid derives cell volume and measure") {
    const Grid g = grid1d(4);
    CHECK(g.cell_volume == doctest::Approx(0.25));
    CHECK(g.measure() == doctest::Approx(1.0));

    const Grid g2 = build_grid(2, std::array<int, 2>{8, 8}, std::array<double, 2>{1.0, 2.0});
    CHECK(g2.measure() == doctest::Approx(2.0));
    CHECK(g2.cell_volume == doctest::Approx((1.0 / 8) * (2.0 / 8)));
}

TEST_CASE("build_grid rejects bad input") {
    CHECK_THROWS_AS(build_grid(1, std::array<int, 1>{0}, std::array<double, 1>{1.0}),
                    ConfigError);
    CHECK_THROWS_AS(build_grid(4, std::array<int, 1>{4}, std::array<double, 1>{1.0}),
                    ConfigError);
    CHECK_THROWS_AS(build_grid(1, std::array<int, 1>{4}, std::array<double, 1>{-1.0}),
                    ConfigError);
}

TEST_CASE("laplacian of a constant is exactly zero") {
    const Grid g = grid1d(16);
    const Field f(g, 3.7);
    const Field lf = laplacian(f);
    for (std::size_t i = 0; i < lf.size(); ++i) CHECK(lf[i] == 0.0);
}

TEST_CASE("laplacian is linear and conservative") {
    const Grid g = build_grid(2, std::array<int, 2>{8, 6}, std::array<double, 2>{1.0, 1.5});
    Rng rng(7);
    const Field f = random_smooth_field(g, rng, 1.0);
    const Field h = random_smooth_field(g, rng, 2.0);
    const Field sum_lap = laplacian(f + h);
    const Field lap_sum = laplacian(f) + laplacian(h);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(sum_lap[i] == doctest::Approx(lap_sum[i]).epsilon(1e-13));

    // Discrete divergence theorem: total flux vanishes (to roundoff).
    double total = 0.0;
    const Field lf = laplacian(f);
    for (std::size_t i = 0; i < lf.size(); ++i) total += lf[i] * g.cell_volume;
    CHECK(std::abs(total) < 1e-11);
}

TEST_CASE("laplacian reproduces the discrete cosine eigenvalue exactly") {
    // Cell-centered cosine modes are exact eigenvectors under mirrored ghosts.
    const int n = 32;
    const Grid g = grid1d(n, 1.0);
    const Field v = cosine_field(g, 1.0, {3, 0, 0});
    const double h = g.h[0];
    const double lambda = 4.0 / (h * h) * std::pow(std::sin(3 * std::numbers::pi * h / 2.0), 2);
    const Field lv = laplacian(v);
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(lv[i] == doctest::Approx(-lambda * v[i]).epsilon(1e-10));
}

TEST_CASE("laplacian converges at second order on Neumann eigenfunctions") {
    // Error against the continuous eigenvalue -(pi/L)^2 measured under
    // refinement; slope must sit in [1.8, 2.2].
    std::vector<double> hs, errs;
    for (int n : {16, 32, 64, 128}) {
        const Grid g = grid1d(n, 1.0);
        const Field v = cosine_field(g, 1.0, {1, 0, 0});
        const Field lv = laplacian(v);
        const double lam = std::numbers::pi * std::numbers::pi;
        Field err = lv;
        axpy(lam, v, err);
        hs.push_back(g.h[0]);
        errs.push_back(l2_norm(err));
    }
    const double slope = fit_slope(hs, errs);
    CHECK(slope > 1.8);
    CHECK(slope < 2.2);
}

TEST_CASE("3D laplacian: constants and conservation") {
    const Grid g =
        build_grid(3, std::array<int, 3>{6, 5, 4}, std::array<double, 3>{1.0, 1.5, 0.5});
    CHECK(g.measure() == doctest::Approx(0.75));
    const Field c(g, -2.5);
    const Field lc = laplacian(c);
    for (std::size_t i = 0; i < lc.size(); ++i) CHECK(lc[i] == 0.0);

    Rng rng(13);
    const Field f = random_smooth_field(g, rng, 1.0, 2);
    double total = 0.0;
    const Field lf = laplacian(f);
    for (std::size_t i = 0; i < lf.size(); ++i) total += lf[i] * g.cell_volume;
    CHECK(std::abs(total) < 1e-10);

    const Field v = cosine_field(g, 1.0, {1, 2, 1});
    const Field lv = laplacian(v);
    double lam = 0.0;
    const std::array<int, 3> modes{1, 2, 1};
    for (int a = 0; a < 3; ++a)
        lam += 4.0 / (g.h[a] * g.h[a]) *
               std::pow(std::sin(modes[a] * std::numbers::pi * g.h[a] / (2.0 * g.lengths[a])), 2);
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(lv[i] == doctest::Approx(-lam * v[i]).epsilon(1e-9));
}

TEST_CASE("inner product properties") {
    const Grid g = grid1d(8);
    const Field one(g, 1.0);
    CHECK(inner(one, one) == doctest::Approx(1.0));
    const Field zero(g, 0.0);
    Rng rng(3);
    const Field f = random_smooth_field(g, rng, 1.0);
    CHECK(inner(f, zero) == 0.0);
    CHECK(inner(f, f) >= 0.0);
    CHECK(inner(f, one) == doctest::Approx(inner(one, f)));

    const Grid g2 = grid1d(16);
    const Field other(g2, 1.0);
    CHECK_THROWS_AS(inner(f, other), ShapeError);
}

TEST_CASE("mean value") {
    const Grid g = grid1d(10);
    CHECK(mean_value(Field(g, 3.5)) == doctest::Approx(3.5));
    CHECK(mean_value(Field(g, 0.0)) == 0.0);
    Field f(g, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = i < 5 ? 0.0 : 1.0;
    CHECK(mean_value(f) == doctest::Approx(0.5));
}

TEST_CASE("riesz operator: constants, roundtrip, symmetry, SPD") {
    const Grid g = grid1d(32);
    const Field c(g, 2.0);
    const Field ac = apply_riesz(c);
    for (std::size_t i = 0; i < ac.size(); ++i) CHECK(ac[i] == doctest::Approx(2.0));
    const Field sc = solve_riesz(c);
    for (std::size_t i = 0; i < sc.size(); ++i) CHECK(sc[i] == doctest::Approx(2.0));

    Rng rng(11);
    const Field f = random_smooth_field(g, rng, 1.0);
    const Field g2 = random_smooth_field(g, rng, 1.0);

    const Field round = solve_riesz(apply_riesz(f));
    const Field diff = round - f;
    CHECK(l2_norm(diff) <= 10.0 * 1e-10 * l2_norm(f));

    CHECK(inner(apply_riesz(f), g2) == doctest::Approx(inner(f, apply_riesz(g2))).epsilon(1e-12));
    CHECK(inner(f, apply_riesz(f)) >= inner(f, f) - 1e-12);
}

TEST_CASE("dual norm: constants, zero, spectral damping of high modes") {
    const Grid g = grid1d(64);
    CHECK(dual_norm(Field(g, 2.0)) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(dual_norm(Field(g, 0.0)) == 0.0);

    // For the k-th discrete cosine mode, dual_norm = ||v|| / sqrt(1 + lambda_k).
    const int k = 5;
    const Field v = cosine_field(g, 1.0, {k, 0, 0});
    const double h = g.h[0];
    const double lam = 4.0 / (h * h) * std::pow(std::sin(k * std::numbers::pi * h / 2.0), 2);
    const double expected = l2_norm(v) / std::sqrt(1.0 + lam);
    CHECK(dual_norm(v) == doctest::Approx(expected).epsilon(1e-7));
    CHECK(dual_norm(v) < l2_norm(v));
}
