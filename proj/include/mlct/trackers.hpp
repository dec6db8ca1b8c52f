#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mlct/lineage.hpp"

namespace mlct {

enum class OverlapCost {
    IoU,                     // 1 - |u n v| / |u u v|
    IntersectionOverTarget,  // 1 - |u n v| / |v|
};

struct TrackerConfig {
    std::string method = "distance";
    double distance_gate = 60.0;    // max centroid displacement, pixels
    bool scale_gate_with_k = true;  // harness multiplies the gate by the subsampling factor
    double birth_cost = 0.9;
    double death_cost = 0.9;
    int division_allowance = 2;     // max children per source
    OverlapCost overlap_cost = OverlapCost::IoU;
};

// Nearest-first greedy linking on centroid distance. Candidate links within
// the gate are accepted in ascending distance order subject to one parent per
// target and the division allowance per source.
LineageGraph track_distance_greedy(const SegmentationSequence& seq, const TrackerConfig& cfg);

// Mask-overlap linking solved as a birth/death-augmented linear assignment
// per frame pair, followed by a division pass that attaches unassigned
// targets to their maximal-overlap already-linked source.
LineageGraph track_lap_overlap(const SegmentationSequence& seq, const TrackerConfig& cfg);

// Calibration references: the ground truth verbatim, and all nodes with no
// edges.
LineageGraph track_oracle(const SegmentationSequence& seq, const LineageGraph& gt);
LineageGraph track_empty(const SegmentationSequence& seq);

// gt is only consulted by the oracle tracker and may be null otherwise.
using TrackerFn = std::function<LineageGraph(const SegmentationSequence& seq,
                                             const LineageGraph* gt,
                                             const TrackerConfig& cfg)>;

// Lookup by name: "distance", "lap", "oracle", "empty".
TrackerFn find_tracker(const std::string& name);
std::vector<std::string> tracker_names();

} // namespace mlct
