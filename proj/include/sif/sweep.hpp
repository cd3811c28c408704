#pragma once

#include <string>
#include <vector>

namespace sif {

/// Grid over constant input I and threshold modulation k for
/// dX = (-gamma X + I) dt, g = 1 + k sin 2 pi t, h = 0.
struct SweepSpec {
    double gamma = 1.0 / 12.8;
    std::vector<double> inputs;
    std::vector<double> ks;
    int max_period = 8;
};

struct SweepCell {
    double input = 0.0;
    double k = 0.0;
    /// "locked", "unlocked", "rotation" (k = 0: rigid rotation, f' = 1) or "no_firing".
    std::string status;
    int period = 0;
    long winding = 0;
    double multiplier = 0.0;
    /// Firing interval mod 1 for rotations.
    double rotation = 0.0;
};

/// Values lo, lo + d, ..., hi with `count` points; count = 1 gives {lo}.
std::vector<double> linspace(double lo, double hi, int count);

/// Cells in row-major order (inputs outer, ks inner), OpenMP over cells.
std::vector<SweepCell> sweep(const SweepSpec& spec);
std::vector<SweepCell> sweep_serial(const SweepSpec& spec);
SweepCell sweep_cell(double gamma, double input, double k, int max_period);

} // namespace sif
