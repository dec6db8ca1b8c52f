#pragma once

#include <optional>

#include "mlct/lineage.hpp"
#include "mlct/matching.hpp"

namespace mlct {

struct EventCounts {
    int64_t tp = 0;
    int64_t fp = 0;
    int64_t fn = 0;

    std::optional<double> precision() const;
    std::optional<double> recall() const;
    // 2*TP / (2*TP + FP + FN); empty when the denominator is zero.
    std::optional<double> f1() const;
};

// Division reconstruction. A ground-truth division (a node with out-degree
// >= 2 and its child set) is a true positive iff the node and every child are
// matched and the matched parent's predicted child set is exactly the matched
// image of the ground-truth child set — same children, no extras, at the
// exact frames. Predicted divisions realizing no such event are false
// positives.
EventCounts div_f1(const LineageGraph& gt, const LineageGraph& pred,
                   const NodeMatching& matching);

// Complete tracks. A ground-truth track is a true positive iff every member
// is matched and the matched members are exactly the member list of one
// predicted track. Predicted tracks realizing no such track are false
// positives.
EventCounts ct_f1(const LineageGraph& gt, const LineageGraph& pred,
                  const NodeMatching& matching);

} // namespace mlct
