#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "mlct/lineage.hpp"

namespace mlct {

inline constexpr int64_t kUnlimitedCells = std::numeric_limits<int64_t>::max();

// Where to cut when the cell count limit is hit. The two rules coincide on
// monotonically growing colonies; Prefix is the default.
enum class TruncationRule {
    Prefix,         // cut at the first retained frame exceeding the limit
    LastCompliant,  // keep everything up to the last retained frame within the limit
};

// One simulated experiment condition: keep every k-th frame starting at
// frame_offset, then truncate by the cell count limit.
struct ExperimentSpec {
    int k = 1;
    int64_t n_max = kUnlimitedCells;
    int frame_offset = 0;
    TruncationRule truncation = TruncationRule::Prefix;
};

struct TransformResult {
    SegmentationSequence seq;      // retained frames, reindexed 0..M-1
    LineageGraph graph;            // induced ground truth over the new indices
    std::vector<int32_t> frame_map;  // new index -> original index
};

// Applies the subsampling + truncation operator. The induced graph has an
// edge u->v between consecutive retained frames iff v descends from u in the
// original graph via a path touching no other retained frame; lineage
// branches born and dead strictly inside a gap leave no node. In-degree <= 1
// survives the transform because ancestor paths are unique.
TransformResult subsample(const SegmentationSequence& seq, const LineageGraph& gt,
                          const ExperimentSpec& spec);

// Per-transition series for one subsampling factor, plus the division
// fraction: division links over all links in the induced graph.
struct IntervalStats {
    int k = 1;
    std::vector<double> divisions;        // index i: transition i -> i+1
    std::vector<double> disappearances;
    std::vector<double> mean_displacement;
    std::vector<double> divisions_smoothed;
    std::vector<double> disappearances_smoothed;
    std::vector<double> mean_displacement_smoothed;
    double smoothing = 0.1;  // EMA weight of the newest sample, recorded in output
    int64_t total_links = 0;
    int64_t division_links = 0;
    double division_fraction = 0.0;
};

std::vector<IntervalStats> interval_stats(const SegmentationSequence& seq,
                                          const LineageGraph& gt,
                                          const std::vector<int>& k_values,
                                          double smoothing = 0.1);

} // namespace mlct
