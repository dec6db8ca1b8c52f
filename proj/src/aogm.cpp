#include "mlct/aogm.hpp"

#include <algorithm>
#include <unordered_set>

namespace mlct {

namespace {

void check_consistent(const LineageGraph& g, const NodeMatching& m, bool gt_side) {
    int64_t covered = 0;
    for (const FrameMatching& f : m.frames)
        covered += gt_side ? static_cast<int64_t>(f.gt_to_pred.size() + f.unmatched_gt.size())
                           : static_cast<int64_t>(f.pred_to_gt.size() + f.unmatched_pred.size());
    if (covered != static_cast<int64_t>(g.node_count()))
        throw Error("matching does not cover the " + std::string(gt_side ? "GT" : "predicted") +
                    " node set (" + std::to_string(covered) + " vs " +
                    std::to_string(g.node_count()) + ")");
}

} // namespace

AogmBreakdown aogm(const LineageGraph& gt, const LineageGraph& pred,
                   const NodeMatching& matching, const AogmWeights& w) {
    check_consistent(gt, matching, true);
    check_consistent(pred, matching, false);

    AogmBreakdown b;
    for (const FrameMatching& f : matching.frames) {
        b.fn += static_cast<int64_t>(f.unmatched_gt.size());
        b.fp += static_cast<int64_t>(f.unmatched_pred.size());
        for (const auto& [p, gts] : f.pred_to_gt)
            b.ns += static_cast<int64_t>(gts.size()) - 1;
    }

    // Edge pass over the ground truth; predicted edges that back no
    // ground-truth edge are deletions. In-degree <= 1 means a predicted edge
    // is identified by its child key alone.
    std::unordered_set<uint64_t> used_children;
    for (auto [g_parent, g_child] : gt.edges_sorted()) {
        auto p_parent = matching.pred_for(g_parent);
        auto p_child = matching.pred_for(g_child);
        if (!p_parent || !p_child || !pred.has_edge(*p_parent, *p_child)) {
            ++b.ea;
            continue;
        }
        used_children.insert(p_child->packed());
        const bool gt_div = gt.out_degree(g_parent) >= 2;
        const bool pred_div = pred.out_degree(*p_parent) >= 2;
        if (gt_div != pred_div)
            ++b.ec;
    }
    b.ed = static_cast<int64_t>(pred.edge_count()) - static_cast<int64_t>(used_children.size());

    b.total = b.ns * w.ns + b.fn * w.fn + b.fp * w.fp + b.ea * w.ea + b.ed * w.ed + b.ec * w.ec;
    b.aogm0 = static_cast<double>(gt.node_count()) * w.fn +
              static_cast<double>(gt.edge_count()) * w.ea;
    b.aogma = b.ea * w.ea + b.ed * w.ed + b.ec * w.ec;
    b.aogma0 = static_cast<double>(gt.edge_count()) * w.ea;
    return b;
}

double tra_from(const AogmBreakdown& b) {
    if (b.aogm0 <= 0.0)
        throw UndefinedMetricError("TRA is undefined on empty ground truth");
    return 1.0 - std::min(b.total, b.aogm0) / b.aogm0;
}

double lnk_from(const AogmBreakdown& b) {
    if (b.aogma0 <= 0.0)
        throw UndefinedMetricError("LNK is undefined on edgeless ground truth");
    return 1.0 - std::min(b.aogma, b.aogma0) / b.aogma0;
}

double tra(const LineageGraph& gt, const LineageGraph& pred, const NodeMatching& matching,
           const AogmWeights& weights) {
    return tra_from(aogm(gt, pred, matching, weights));
}

double lnk(const LineageGraph& gt, const LineageGraph& pred, const NodeMatching& matching,
           const AogmWeights& weights) {
    return lnk_from(aogm(gt, pred, matching, weights));
}

} // namespace mlct
