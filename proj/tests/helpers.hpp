#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "mlct/lineage.hpp"

namespace mlct::testing {

// Deterministic uniform helper mirroring the library's convention.
struct TestRng {
    std::mt19937_64 eng;
    explicit TestRng(uint64_t seed) : eng(seed) {}
    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(uniform() * (hi - lo + 1.0 - 1e-12));
    }
};

// Seeded random lineage: chains that divide, die, and occasionally reattach
// across a frame gap, capped at max_nodes. Exercises graph operations without
// any mask geometry.
inline LineageGraph random_lineage(uint64_t seed, int max_nodes = 200) {
    TestRng rng(seed);
    const int frames = rng.uniform_int(8, 14);
    const int roots = rng.uniform_int(1, 3);

    LineageGraph g;
    int32_t next_label = 1;
    struct Live {
        NodeKey node;
    };
    std::vector<Live> live;
    int nodes = 0;
    for (int r = 0; r < roots; ++r) {
        NodeKey k{0, next_label++};
        g.add_node(k);
        live.push_back({k});
        ++nodes;
    }
    for (int32_t f = 1; f < frames && nodes < max_nodes; ++f) {
        std::vector<Live> next;
        for (const Live& cell : live) {
            if (nodes >= max_nodes)
                break;
            // gap edges (parent link skipping a frame) show up occasionally
            const double roll = rng.uniform();
            if (roll < 0.06)
                continue;  // dies
            if (cell.node.frame >= f) {  // born ahead of this frame via a gap edge
                next.push_back(cell);
                continue;
            }
            if (roll < 0.24) {
                const int kids = rng.uniform() < 0.85 ? 2 : 3;
                for (int c = 0; c < kids && nodes < max_nodes; ++c) {
                    const int32_t gap = rng.uniform() < 0.15 ? 1 : 0;
                    const int32_t bf = std::min<int32_t>(f + gap, frames - 1);
                    if (bf <= cell.node.frame)
                        continue;
                    NodeKey child{bf, next_label++};
                    g.add_node(child);
                    g.add_edge(cell.node, child);
                    ++nodes;
                    next.push_back({child});
                }
            } else {
                // continuation keeps the label; labels are frame-local
                NodeKey child{f, cell.node.label};
                g.add_node(child);
                g.add_edge(cell.node, child);
                ++nodes;
                next.push_back({child});
            }
        }
        live = std::move(next);
    }
    g.finalize();
    return g;
}

// Builds masks for a graph: every node becomes a single pixel at a position
// derived from its label, so per-frame pixel sets are trivially disjoint.
inline SegmentationSequence sequence_for(const LineageGraph& g, int32_t frames = -1) {
    const int32_t n = frames < 0 ? g.frame_count() : frames;
    int32_t max_label = 1;
    for (NodeKey k : g.nodes_sorted())
        max_label = std::max(max_label, k.label);
    const int32_t w = 64;
    const int32_t h = (max_label + w) / w + 1;
    SegmentationSequence seq;
    for (int32_t f = 0; f < n; ++f) {
        std::vector<uint16_t> raster(static_cast<std::size_t>(w) * h, 0);
        for (int32_t label : g.labels_at(f)) {
            const int32_t x = label % w;
            const int32_t y = label / w;
            raster[static_cast<std::size_t>(y) * w + x] = static_cast<uint16_t>(label);
        }
        seq.frames.push_back(LabelFrame::from_raster(f, w, h, raster));
    }
    return seq;
}

// Independent oracle for the induced-edge rule: enumerate every descendant
// path explicitly and keep those that end on the next retained frame without
// touching any other retained node in between.
inline std::set<std::pair<uint64_t, uint64_t>> induced_edges_oracle(
    const LineageGraph& g, const std::vector<int32_t>& retained) {
    std::set<int32_t> retained_set(retained.begin(), retained.end());
    std::set<std::pair<uint64_t, uint64_t>> out;
    for (std::size_t i = 0; i + 1 < retained.size(); ++i) {
        const int32_t from = retained[i];
        const int32_t to = retained[i + 1];
        for (int32_t label : g.labels_at(from)) {
            // full path enumeration with an explicit path stack
            std::vector<std::vector<NodeKey>> paths;
            paths.push_back({NodeKey{from, label}});
            while (!paths.empty()) {
                std::vector<NodeKey> path = std::move(paths.back());
                paths.pop_back();
                const NodeKey tail = path.back();
                for (NodeKey w : g.children(tail)) {
                    bool crosses = false;
                    for (std::size_t p = 1; p < path.size(); ++p)
                        if (retained_set.contains(path[p].frame))
                            crosses = true;
                    if (crosses)
                        continue;
                    if (w.frame == to) {
                        out.emplace(NodeKey{from, label}.packed(), w.packed());
                    } else if (w.frame < to) {
                        auto longer = path;
                        longer.push_back(w);
                        paths.push_back(std::move(longer));
                    }
                }
            }
        }
    }
    return out;
}

} // namespace mlct::testing
