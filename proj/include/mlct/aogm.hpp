#pragma once

#include "mlct/lineage.hpp"
#include "mlct/matching.hpp"

namespace mlct {

// Per-operation penalty costs for transforming a prediction into the ground
// truth. Defaults follow the cell tracking challenge convention.
struct AogmWeights {
    double ns = 5.0;   // split a falsely merged node
    double fn = 10.0;  // add a missing node
    double fp = 1.0;   // delete a spurious node
    double ea = 1.5;   // add a missing edge
    double ed = 1.0;   // delete a spurious edge
    double ec = 1.0;   // change edge semantics (link vs. division)
    friend bool operator==(const AogmWeights&, const AogmWeights&) = default;
};

struct AogmBreakdown {
    int64_t ns = 0;
    int64_t fn = 0;
    int64_t fp = 0;
    int64_t ea = 0;
    int64_t ed = 0;
    int64_t ec = 0;
    double total = 0.0;   // weighted sum of all operations
    double aogm0 = 0.0;   // cost of building the ground truth from an empty graph
    double aogma = 0.0;   // edge operations only
    double aogma0 = 0.0;  // cost of adding every ground-truth edge
};

// Counts the node and edge operations implied by the matching. A ground-truth
// edge is reproduced when both endpoints are matched and the predicted edge
// between the matched counterparts exists; if it exists but its division/link
// semantics differ, only an edge-change is charged. An edge is a division
// edge iff its parent's out-degree is >= 2 in the respective graph.
AogmBreakdown aogm(const LineageGraph& gt, const LineageGraph& pred,
                   const NodeMatching& matching, const AogmWeights& weights);

// 1 - min(AOGM, AOGM_0)/AOGM_0. Undefined on empty ground truth.
double tra(const LineageGraph& gt, const LineageGraph& pred, const NodeMatching& matching,
           const AogmWeights& weights);

// Edge-operations-only variant, node costs zeroed. Undefined when the ground
// truth has no edges.
double lnk(const LineageGraph& gt, const LineageGraph& pred, const NodeMatching& matching,
           const AogmWeights& weights);

double tra_from(const AogmBreakdown& b);
double lnk_from(const AogmBreakdown& b);

} // namespace mlct
