#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "mlct/lineage.hpp"

namespace mlct {

// Node correspondence within one frame. A ground-truth region matches the
// predicted region covering a strict majority of its pixels, which makes the
// assignment unique; a predicted region matched by two or more ground-truth
// regions is an under-segmentation (split) site.
struct FrameMatching {
    std::unordered_map<int32_t, int32_t> gt_to_pred;
    std::unordered_map<int32_t, std::vector<int32_t>> pred_to_gt;  // values sorted
    std::vector<int32_t> unmatched_gt;    // false negatives, sorted
    std::vector<int32_t> unmatched_pred;  // false positives, sorted
};

struct NodeMatching {
    std::vector<FrameMatching> frames;

    std::optional<NodeKey> pred_for(NodeKey gt) const;
    int64_t matched_count() const;
    int64_t false_negatives() const;
    int64_t false_positives() const;
};

FrameMatching match_one_frame(const LabelFrame& gt, const LabelFrame& pred);

// Per-frame matching of two sequences; frames are independent, so this runs
// the frame loop in parallel. match_frames_serial is the plain-loop reference
// kept for testing and benchmarking — the two must agree exactly.
NodeMatching match_frames(const SegmentationSequence& gt, const SegmentationSequence& pred);
NodeMatching match_frames_serial(const SegmentationSequence& gt,
                                 const SegmentationSequence& pred);

// Fast path for predictions that reuse the ground-truth masks (the usual
// tracking-by-detection setting): matching degenerates to label identity.
// Result-identical to match_frames(seq, seq).
NodeMatching identity_matching(const SegmentationSequence& seq);

} // namespace mlct
