#include "mlct/events.hpp"

#include <algorithm>
#include <unordered_set>

namespace mlct {

std::optional<double> EventCounts::precision() const {
    if (tp + fp == 0)
        return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> EventCounts::recall() const {
    if (tp + fn == 0)
        return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::optional<double> EventCounts::f1() const {
    const int64_t denom = 2 * tp + fp + fn;
    if (denom == 0)
        return std::nullopt;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

EventCounts div_f1(const LineageGraph& gt, const LineageGraph& pred,
                   const NodeMatching& matching) {
    EventCounts c;
    std::unordered_set<uint64_t> realized;  // predicted division nodes backing a TP

    for (NodeKey g : gt.nodes_sorted()) {
        if (gt.out_degree(g) < 2)
            continue;
        auto pg = matching.pred_for(g);
        bool ok = pg.has_value();
        std::vector<NodeKey> image;
        if (ok)
            for (NodeKey child : gt.children(g)) {
                auto pc = matching.pred_for(child);
                if (!pc || pc->frame != child.frame) {
                    ok = false;
                    break;
                }
                image.push_back(*pc);
            }
        if (ok) {
            auto kids = pred.children(*pg);
            std::vector<NodeKey> pred_kids(kids.begin(), kids.end());
            std::sort(image.begin(), image.end());
            image.erase(std::unique(image.begin(), image.end()), image.end());
            ok = pred_kids == image;
        }
        if (ok) {
            ++c.tp;
            realized.insert(pg->packed());
        } else {
            ++c.fn;
        }
    }

    for (NodeKey p : pred.nodes_sorted())
        if (pred.out_degree(p) >= 2 && !realized.contains(p.packed()))
            ++c.fp;
    return c;
}

EventCounts ct_f1(const LineageGraph& gt, const LineageGraph& pred,
                  const NodeMatching& matching) {
    const std::vector<Track> gt_tracks = build_tracks(gt);
    const std::vector<Track> pred_tracks = build_tracks(pred);

    // predicted tracks are disjoint, so the first member identifies one
    std::unordered_map<uint64_t, const Track*> pred_by_first;
    for (const Track& t : pred_tracks)
        pred_by_first.emplace(t.members.front().packed(), &t);

    EventCounts c;
    std::unordered_set<const Track*> realized;
    for (const Track& t : gt_tracks) {
        std::vector<NodeKey> image;
        image.reserve(t.members.size());
        bool ok = true;
        for (NodeKey m : t.members) {
            auto p = matching.pred_for(m);
            if (!p) {
                ok = false;
                break;
            }
            image.push_back(*p);
        }
        const Track* pt = nullptr;
        if (ok) {
            auto it = pred_by_first.find(image.front().packed());
            pt = it == pred_by_first.end() ? nullptr : it->second;
            ok = pt && pt->members == image;
        }
        if (ok) {
            ++c.tp;
            realized.insert(pt);
        } else {
            ++c.fn;
        }
    }
    c.fp = static_cast<int64_t>(pred_tracks.size()) - static_cast<int64_t>(realized.size());
    return c;
}

} // namespace mlct
