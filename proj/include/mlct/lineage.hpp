#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mlct/errors.hpp"

namespace mlct {

// Identity of one detection: region label within a sampled frame.
// Labels are frame-local; (frame, label) is the universal node key.
struct NodeKey {
    int32_t frame = 0;
    int32_t label = 0;

    friend bool operator==(NodeKey, NodeKey) = default;
    friend auto operator<=>(NodeKey, NodeKey) = default;

    uint64_t packed() const {
        return (static_cast<uint64_t>(static_cast<uint32_t>(frame)) << 32) |
               static_cast<uint32_t>(label);
    }
    static NodeKey unpack(uint64_t v) {
        return {static_cast<int32_t>(v >> 32), static_cast<int32_t>(v & 0xffffffffu)};
    }
    std::string str() const;
};

struct NodeKeyHash {
    std::size_t operator()(NodeKey k) const noexcept {
        uint64_t v = k.packed();
        v ^= v >> 33;
        v *= 0xff51afd7ed558ccdULL;
        v ^= v >> 33;
        return static_cast<std::size_t>(v);
    }
};

// Maximal run of equal-label pixels within one image row, [x_begin, x_end).
struct PixelRun {
    int32_t y = 0;
    int32_t x_begin = 0;
    int32_t x_end = 0;
    friend bool operator==(const PixelRun&, const PixelRun&) = default;
};

// One segmented region. Pixels are kept run-length encoded per row;
// centroid, area and bounding box are derived once at construction.
struct Detection {
    int32_t frame = 0;
    int32_t label = 0;   // >= 1, 0 is background
    double cx = 0.0;
    double cy = 0.0;
    int64_t area = 0;
    int32_t min_x = 0, min_y = 0, max_x = -1, max_y = -1;  // inclusive bbox
    std::vector<PixelRun> runs;

    NodeKey key() const { return {frame, label}; }
};

// One time point's detections derived from a 2D integer label image.
// Distinct labels have disjoint pixel sets by construction.
class LabelFrame {
public:
    LabelFrame() = default;

    // Builds detection records from a row-major label raster. Labels may be
    // non-contiguous; every distinct nonzero value yields exactly one detection.
    static LabelFrame from_raster(int32_t index, int32_t width, int32_t height,
                                  std::span<const uint16_t> labels);

    int32_t index() const { return index_; }
    int32_t width() const { return width_; }
    int32_t height() const { return height_; }
    const std::vector<Detection>& detections() const { return detections_; }

    // nullptr when the label is not present.
    const Detection* find(int32_t label) const;

    std::vector<uint16_t> rasterize() const;

    void set_index(int32_t index);

private:
    int32_t index_ = 0;
    int32_t width_ = 0;
    int32_t height_ = 0;
    std::vector<Detection> detections_;  // sorted by label
};

// Ordered list of label frames with contiguous indices 0..L-1.
struct SegmentationSequence {
    std::vector<LabelFrame> frames;
    double frame_interval_minutes = 1.0;

    std::size_t size() const { return frames.size(); }
};

// Acyclic oriented graph of detections. Edges go strictly forward in time
// and every node has at most one parent; both are enforced at insertion.
// Out-degree is unbounded here (subsampling can collapse several divisions
// into one gap); the binary-division bound of native-interval ground truth
// is a separate validation, not a type invariant.
//
// Mutation is single-threaded; after finalize() the graph is immutable and
// safe to share across concurrent readers.
class LineageGraph {
public:
    void add_node(NodeKey key);
    void add_edge(NodeKey parent, NodeKey child);
    void finalize();

    bool has_node(NodeKey key) const;
    bool has_edge(NodeKey parent, NodeKey child) const;
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return parent_.size(); }
    bool empty() const { return nodes_.empty(); }

    // Number of sampled frames spanned by the node set (max frame + 1).
    int32_t frame_count() const { return frame_count_; }

    int out_degree(NodeKey key) const;
    std::span<const NodeKey> children(NodeKey key) const;
    std::optional<NodeKey> parent(NodeKey key) const;

    // Deterministic (frame, label)-ordered views.
    const std::vector<int32_t>& labels_at(int32_t frame) const;
    std::vector<NodeKey> nodes_sorted() const;
    std::vector<std::pair<NodeKey, NodeKey>> edges_sorted() const;

private:
    void ensure_sorted() const;

    std::unordered_set<uint64_t> nodes_;
    std::vector<std::vector<int32_t>> by_frame_;
    std::unordered_map<uint64_t, NodeKey> parent_;                 // child -> parent
    std::unordered_map<uint64_t, std::vector<NodeKey>> children_;  // parent -> children
    int32_t frame_count_ = 0;
    bool sorted_ = true;
};

// Maximal branch of the lineage graph: consecutive sampled frames with no
// internal division. Only the last member may have out-degree > 1.
struct Track {
    int32_t id = 0;            // >= 1
    int32_t begin_frame = 0;
    int32_t end_frame = 0;
    int32_t parent_track = 0;  // 0 = no parent
    std::vector<NodeKey> members;
};

// Canonical decomposition: cut at every division node and every frame gap.
// Track ids are assigned 1..N in (begin_frame, first label) order, so the
// decomposition is deterministic and parent links always point backward.
std::vector<Track> build_tracks(const LineageGraph& graph);

// Nodes with out-degree > 2, sorted. Empty for native-interval ground truth;
// legal after heavy subsampling.
std::vector<NodeKey> validate_binary_divisions(const LineageGraph& graph);

struct GraphStats {
    int64_t instances = 0;
    int64_t tracks = 0;
    int64_t divisions = 0;        // nodes with out-degree >= 2
    int64_t disappearances = 0;   // out-degree 0 before the final frame
    std::vector<int64_t> cells_per_frame;
};

GraphStats graph_stats(const LineageGraph& graph);

} // namespace mlct
