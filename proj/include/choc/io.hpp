#pragma once

#include <string>
#include <vector>

#include "choc/cost.hpp"
#include "choc/grid.hpp"

namespace choc {

/// One row of the simulate time series. Column order is fixed:
/// t, J_total, J_b1..J_b6, mass, phi_min, phi_max, margin, newton_iters.
struct TimeseriesRow {
    double t = 0.0;
    double j_total = 0.0;
    double j_b1 = 0.0, j_b2 = 0.0, j_b3 = 0.0, j_b4 = 0.0, j_b5 = 0.0, j_b6 = 0.0;
    double mass = 0.0;
    double phi_min = 0.0;
    double phi_max = 0.0;
    double margin = 0.0;
    int newton_iters = 0;
};

/// CHCF flat binary snapshot: magic "CHCF", u32 version, u32 dim,
/// u32 n-per-axis x dim, f64 lengths x dim, u32 field count, then row-major
/// f64 little-endian payload per field.
void write_snapshot(std::span<const Field> fields, const std::string& path);
std::vector<Field> read_snapshot(const std::string& path);

void write_timeseries(std::span<const TimeseriesRow> rows, const std::string& path);

/// One row per node 0..nt. The J columns are instantaneous spatial integrals
/// at each node (terminal-type terms report the distance to their target at
/// that node); J_total additionally includes the b0 term of the interval.
std::vector<TimeseriesRow> timeseries_rows(const Trajectory& traj, const ControlTrajectory& u,
                                           const CostSpec& cost);

}  // namespace choc
