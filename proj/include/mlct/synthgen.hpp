#pragma once

#include <cstdint>
#include <string>

#include "mlct/lineage.hpp"

namespace mlct {

// Parameters of the rod-cell colony generator. All randomness flows from the
// seed through a single engine, so a given parameter set is byte-identical
// across runs.
struct ColonyParams {
    uint64_t seed = 1;
    int32_t width = 256;          // chamber, pixels
    int32_t height = 160;
    int initial_cells = 1;
    double division_time_mean = 10.0;   // frames, >= 2
    double division_time_jitter = 2.0;  // uniform +- jitter
    double rod_length = 14.0;           // initial cap-to-cap length, pixels
    double rod_width = 5.0;
    double snap_angle_deg = 25.0;       // post-division reorientation
    double growth_rate = 0.7;           // length increase per frame, pixels
    int32_t frames = 60;
};

struct Colony {
    SegmentationSequence seq;
    LineageGraph graph;
    bool truncated = false;   // chamber overflow stopped generation early
    std::string warning;
};

// Grows a seeded colony: rods grow linearly, divide into two snap-rotated
// daughters at their sampled division times, are rasterized without overlap,
// and disappear when crossing the left or right chamber border. The emitted
// ground truth has binary divisions only.
Colony generate(const ColonyParams& params);

} // namespace mlct
