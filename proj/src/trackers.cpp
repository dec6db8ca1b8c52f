#include "mlct/trackers.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mlct/assignment.hpp"

namespace mlct {

namespace {

// Trackers never invent or drop detections: the output node set is always the
// input detection set.
LineageGraph graph_with_all_nodes(const SegmentationSequence& seq) {
    LineageGraph g;
    for (const LabelFrame& f : seq.frames)
        for (const Detection& d : f.detections())
            g.add_node(d.key());
    return g;
}

struct Overlap {
    int32_t source = 0;  // label in frame t
    int32_t target = 0;  // label in frame t+1
    int64_t pixels = 0;
};

// Pixel overlaps between consecutive frames via one raster pass.
std::vector<Overlap> frame_overlaps(const LabelFrame& a, const LabelFrame& b) {
    std::vector<uint16_t> rb = b.rasterize();
    std::unordered_map<uint64_t, int64_t> counts;
    for (const Detection& d : a.detections())
        for (const PixelRun& r : d.runs) {
            const uint16_t* row = rb.data() + static_cast<std::size_t>(r.y) * b.width();
            for (int32_t x = r.x_begin; x < r.x_end; ++x)
                if (row[x] != 0)
                    ++counts[(static_cast<uint64_t>(static_cast<uint32_t>(d.label)) << 32) |
                             row[x]];
        }
    std::vector<Overlap> out;
    out.reserve(counts.size());
    for (auto [key, n] : counts)
        out.push_back({static_cast<int32_t>(key >> 32),
                       static_cast<int32_t>(key & 0xffffffffu), n});
    std::sort(out.begin(), out.end(), [](const Overlap& x, const Overlap& y) {
        return std::tie(x.source, x.target) < std::tie(y.source, y.target);
    });
    return out;
}

} // namespace

LineageGraph track_distance_greedy(const SegmentationSequence& seq, const TrackerConfig& cfg) {
    if (seq.frames.empty())
        throw InputError("cannot track an empty sequence");
    if (cfg.distance_gate <= 0.0)
        throw InputError("distance gate must be positive");

    LineageGraph g = graph_with_all_nodes(seq);
    struct Cand {
        double dist;
        int32_t source, target;
    };
    for (std::size_t t = 0; t + 1 < seq.frames.size(); ++t) {
        const auto& src = seq.frames[t].detections();
        const auto& dst = seq.frames[t + 1].detections();
        std::vector<Cand> cands;
        for (const Detection& u : src)
            for (const Detection& v : dst) {
                const double d = std::hypot(v.cx - u.cx, v.cy - u.cy);
                if (d <= cfg.distance_gate)
                    cands.push_back({d, u.label, v.label});
            }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            return std::tie(a.dist, a.source, a.target) < std::tie(b.dist, b.source, b.target);
        });
        std::unordered_map<int32_t, int> child_count;
        std::unordered_map<int32_t, bool> target_taken;
        for (const Cand& c : cands) {
            if (target_taken[c.target])
                continue;
            int& n = child_count[c.source];
            if (n >= cfg.division_allowance)
                continue;
            ++n;
            target_taken[c.target] = true;
            g.add_edge({static_cast<int32_t>(t), c.source},
                       {static_cast<int32_t>(t + 1), c.target});
        }
    }
    g.finalize();
    return g;
}

LineageGraph track_lap_overlap(const SegmentationSequence& seq, const TrackerConfig& cfg) {
    if (seq.frames.empty())
        throw InputError("cannot track an empty sequence");

    LineageGraph g = graph_with_all_nodes(seq);
    for (std::size_t t = 0; t + 1 < seq.frames.size(); ++t) {
        const auto& src = seq.frames[t].detections();
        const auto& dst = seq.frames[t + 1].detections();
        const int ns = static_cast<int>(src.size());
        const int nt = static_cast<int>(dst.size());
        if (ns == 0 || nt == 0)
            continue;

        std::unordered_map<int32_t, int> src_idx, dst_idx;
        for (int i = 0; i < ns; ++i)
            src_idx.emplace(src[i].label, i);
        for (int j = 0; j < nt; ++j)
            dst_idx.emplace(dst[j].label, j);

        const std::vector<Overlap> overlaps = frame_overlaps(seq.frames[t], seq.frames[t + 1]);
        CostMatrix links(ns, nt, kForbidden);
        for (const Overlap& o : overlaps) {
            const Detection& u = src[src_idx.at(o.source)];
            const Detection& v = dst[dst_idx.at(o.target)];
            const double denom = cfg.overlap_cost == OverlapCost::IoU
                ? static_cast<double>(u.area + v.area - o.pixels)
                : static_cast<double>(v.area);
            links.at(src_idx.at(o.source), dst_idx.at(o.target)) =
                1.0 - static_cast<double>(o.pixels) / denom;
        }

        const Assignment sol = solve(
            CostMatrix::augment_birth_death(links, cfg.birth_cost, cfg.death_cost));

        std::vector<int> child_count(ns, 0);
        std::vector<bool> target_linked(nt, false);
        for (int i = 0; i < ns; ++i) {
            const int j = sol.row_to_col[i];
            if (j < nt) {
                g.add_edge({static_cast<int32_t>(t), src[i].label},
                           {static_cast<int32_t>(t + 1), dst[j].label});
                ++child_count[i];
                target_linked[j] = true;
            }
        }

        // division pass: give each still-unassigned target to the
        // maximal-overlap source that already has a link and spare allowance
        for (int j = 0; j < nt; ++j) {
            if (target_linked[j])
                continue;
            int best_i = -1;
            int64_t best_pixels = 0;
            for (const Overlap& o : overlaps) {
                if (dst_idx.at(o.target) != j)
                    continue;
                const int i = src_idx.at(o.source);
                if (child_count[i] < 1 || child_count[i] >= cfg.division_allowance)
                    continue;
                if (o.pixels > best_pixels) {
                    best_pixels = o.pixels;
                    best_i = i;
                }
            }
            if (best_i >= 0) {
                g.add_edge({static_cast<int32_t>(t), src[best_i].label},
                           {static_cast<int32_t>(t + 1), dst[j].label});
                ++child_count[best_i];
            }
        }
    }
    g.finalize();
    return g;
}

LineageGraph track_oracle(const SegmentationSequence& seq, const LineageGraph& gt) {
    (void)seq;
    return gt;
}

LineageGraph track_empty(const SegmentationSequence& seq) {
    LineageGraph g = graph_with_all_nodes(seq);
    g.finalize();
    return g;
}

TrackerFn find_tracker(const std::string& name) {
    if (name == "distance")
        return [](const SegmentationSequence& s, const LineageGraph*, const TrackerConfig& c) {
            return track_distance_greedy(s, c);
        };
    if (name == "lap")
        return [](const SegmentationSequence& s, const LineageGraph*, const TrackerConfig& c) {
            return track_lap_overlap(s, c);
        };
    if (name == "oracle")
        return [](const SegmentationSequence& s, const LineageGraph* gt, const TrackerConfig&) {
            if (!gt)
                throw InputError("oracle tracker requires ground truth");
            return track_oracle(s, *gt);
        };
    if (name == "empty")
        return [](const SegmentationSequence& s, const LineageGraph*, const TrackerConfig&) {
            return track_empty(s);
        };
    throw InputError("unknown tracker '" + name + "'");
}

std::vector<std::string> tracker_names() {
    return {"distance", "lap", "oracle", "empty"};
}

} // namespace mlct
