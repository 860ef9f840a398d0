#include "choc/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "choc/errors.hpp"

namespace choc {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw IoError("snapshot truncated: " + path);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& is, const std::string& path) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8))
        throw IoError("snapshot truncated: " + path);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

constexpr char kMagic[4] = {'C', 'H', 'C', 'F'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_snapshot(std::span<const Field> fields, const std::string& path) {
    if (fields.empty()) throw IoError("write_snapshot: no fields for " + path);
    const Grid& g = fields[0].grid();
    for (const Field& f : fields)
        if (!(f.grid() == g)) throw ShapeError("write_snapshot: mixed grids");

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(g.dim));
    for (int a = 0; a < g.dim; ++a) put_u32(os, static_cast<std::uint32_t>(g.n[a]));
    for (int a = 0; a < g.dim; ++a) put_f64(os, g.lengths[a]);
    put_u32(os, static_cast<std::uint32_t>(fields.size()));
    for (const Field& f : fields)
        for (double v : f.values()) put_f64(os, v);
    if (!os) throw IoError("write failed: " + path);
}

std::vector<Field> read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("not a CHCF snapshot: " + path);
    const std::uint32_t version = get_u32(is, path);
    if (version != kVersion)
        throw IoError("unsupported CHCF version " + std::to_string(version) + ": " + path);
    const std::uint32_t dim = get_u32(is, path);
    if (dim < 1 || dim > 3) throw IoError("bad dim in snapshot: " + path);
    std::vector<int> n(dim);
    std::vector<double> lengths(dim);
    for (auto& v : n) v = static_cast<int>(get_u32(is, path));
    for (auto& v : lengths) v = get_f64(is, path);
    const Grid g = build_grid(static_cast<int>(dim), n, lengths);
    const std::uint32_t count = get_u32(is, path);

    std::vector<Field> fields;
    fields.reserve(count);
    for (std::uint32_t f = 0; f < count; ++f) {
        std::vector<double> vals(g.size());
        for (auto& v : vals) v = get_f64(is, path);
        fields.emplace_back(g, std::move(vals));
    }
    return fields;
}

std::vector<TimeseriesRow> timeseries_rows(const Trajectory& traj, const ControlTrajectory& u,
                                           const CostSpec& c) {
    const ModelParams& p = traj.params;
    const Grid& g = traj.at(0).phi.grid();
    const Field one(g, 1.0);
    const double dt = p.dt();

    std::vector<TimeseriesRow> rows;
    rows.reserve(traj.nt() + 1);
    for (int n = 0; n <= traj.nt(); ++n) {
        const StateTriple& s = traj.at(n);
        TimeseriesRow r;
        r.t = n * dt;
        auto half_sq = [](double w, const Field& d) { return 0.5 * w * inner(d, d); };
        r.j_b1 = c.b1 != 0.0 ? half_sq(c.b1, misfit(s.phi, c.phi_q, n)) : 0.0;
        r.j_b2 = c.b2 != 0.0 ? half_sq(c.b2, misfit_terminal(s.phi, c.phi_omega)) : 0.0;
        r.j_b3 = c.b3 != 0.0 ? half_sq(c.b3, misfit(s.sigma, c.sigma_q, n)) : 0.0;
        r.j_b4 = c.b4 != 0.0 ? half_sq(c.b4, misfit_terminal(s.sigma, c.sigma_omega)) : 0.0;
        r.j_b5 = c.b5 != 0.0 ? half_sq(c.b5, misfit(s.mu, c.mu_q, n)) : 0.0;
        r.j_b6 = c.b6 != 0.0 ? half_sq(c.b6, misfit_terminal(s.mu, c.mu_omega)) : 0.0;
        const double j_b0 = (n >= 1 && c.b0 != 0.0) ? half_sq(c.b0, u.at(n)) : 0.0;
        r.j_total = j_b0 + r.j_b1 + r.j_b2 + r.j_b3 + r.j_b4 + r.j_b5 + r.j_b6;
        r.mass = p.alpha * inner(s.mu, one) + inner(s.phi, one) + inner(s.sigma, one);
        r.phi_min = min_value(s.phi);
        r.phi_max = max_value(s.phi);
        r.margin =
            std::min(r.phi_min - p.potential.r_minus(), p.potential.r_plus() - r.phi_max);
        r.newton_iters =
            n >= 1 ? traj.step_stats[static_cast<std::size_t>(n - 1)].newton_iters : 0;
        rows.push_back(r);
    }
    return rows;
}

void write_timeseries(std::span<const TimeseriesRow> rows, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "t,J_total,J_b1,J_b2,J_b3,J_b4,J_b5,J_b6,mass,phi_min,phi_max,margin,newton_iters\n";
    os.precision(17);
    for (const auto& r : rows) {
        os << r.t << ',' << r.j_total << ',' << r.j_b1 << ',' << r.j_b2 << ',' << r.j_b3 << ','
           << r.j_b4 << ',' << r.j_b5 << ',' << r.j_b6 << ',' << r.mass << ',' << r.phi_min
           << ',' << r.phi_max << ',' << r.margin << ',' << r.newton_iters << '\n';
    }
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace choc
