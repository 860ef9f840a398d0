#include "choc/rng.hpp"

#include <cmath>
#include <vector>

namespace choc {

namespace {

struct ModeCombo {
    std::vector<std::array<int, 3>> modes;
    std::vector<double> coef;
};

ModeCombo draw_modes(const Grid& g, Rng& rng, int max_mode) {
    ModeCombo mc;
    const int mx = max_mode;
    const int my = g.dim >= 2 ? max_mode : 0;
    const int mz = g.dim >= 3 ? max_mode : 0;
    for (int kx = 0; kx <= mx; ++kx)
        for (int ky = 0; ky <= my; ++ky)
            for (int kz = 0; kz <= mz; ++kz) {
                const double decay = 1.0 / (1.0 + kx * kx + ky * ky + kz * kz);
                mc.modes.push_back({kx, ky, kz});
                mc.coef.push_back(rng.uniform(-1.0, 1.0) * decay);
            }
    return mc;
}

Field assemble(const Grid& g, const ModeCombo& mc, const std::vector<double>& coef) {
    Field f(g, 0.0);
    for (std::size_t m = 0; m < mc.modes.size(); ++m)
        if (coef[m] != 0.0) f += cosine_field(g, coef[m], mc.modes[m]);
    return f;
}

}  // namespace

Field random_smooth_field(const Grid& g, Rng& rng, double amp, int max_mode) {
    const ModeCombo mc = draw_modes(g, rng, max_mode);
    Field f = assemble(g, mc, mc.coef);
    const double m = std::max(std::abs(min_value(f)), std::abs(max_value(f)));
    if (m > 0.0) {
        const double s = amp / m;
        for (auto& v : f.values()) v *= s;
    }
    return f;
}

ControlTrajectory random_smooth_control(const Grid& g, int nt, Rng& rng, double amp,
                                        int max_mode) {
    const ModeCombo mc = draw_modes(g, rng, max_mode);
    std::vector<double> slope(mc.coef.size());
    for (auto& s : slope) s = rng.uniform(-1.0, 1.0);

    std::vector<Field> fields;
    fields.reserve(nt);
    double peak = 0.0;
    std::vector<double> c(mc.coef.size());
    for (int n = 1; n <= nt; ++n) {
        const double t = static_cast<double>(n) / nt;
        for (std::size_t m = 0; m < c.size(); ++m)
            c[m] = mc.coef[m] * (1.0 + 0.5 * slope[m] * t);
        Field f = assemble(g, mc, c);
        peak = std::max({peak, std::abs(min_value(f)), std::abs(max_value(f))});
        fields.push_back(std::move(f));
    }
    if (peak > 0.0) {
        const double s = amp / peak;
        for (auto& f : fields)
            for (auto& v : f.values()) v *= s;
    }
    return ControlTrajectory(std::move(fields));
}

}  // namespace choc
