#pragma once

#include <array>
#include <cstdint>

#include "choc/grid.hpp"
#include "choc/model.hpp"

namespace choc {

/// Deterministic splitmix64 generator. Hand-rolled so seeded runs are
/// bit-identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }
    bool coin() { return (next_u64() & 1ULL) != 0; }

private:
    std::uint64_t state_;
};

/// Smooth random field: combination of the first `max_mode` Neumann cosine
/// modes per axis with 1/(1+|k|^2) decay, scaled so the max amplitude is amp.
Field random_smooth_field(const Grid& g, Rng& rng, double amp, int max_mode = 3);

/// Smooth random control: per-mode coefficients vary affinely in time.
ControlTrajectory random_smooth_control(const Grid& g, int nt, Rng& rng, double amp,
                                        int max_mode = 3);

}  // namespace choc
