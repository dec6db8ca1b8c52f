#include "mlct/lineage.hpp"

#include <algorithm>
#include <map>

namespace mlct {

std::string NodeKey::str() const {
    return "(" + std::to_string(frame) + "," + std::to_string(label) + ")";
}

// ---------------------------------------------------------------------------
// LabelFrame

LabelFrame LabelFrame::from_raster(int32_t index, int32_t width, int32_t height,
                                   std::span<const uint16_t> labels) {
    if (width <= 0 || height <= 0)
        throw InputError("label frame dimensions must be positive");
    if (labels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw InputError("label raster size does not match dimensions");

    struct Acc {
        int64_t area = 0;
        int64_t sum_x = 0, sum_y = 0;
        int32_t min_x = 0, min_y = 0, max_x = -1, max_y = -1;
        std::vector<PixelRun> runs;
    };
    std::map<int32_t, Acc> acc;  // ordered: detections come out sorted by label

    for (int32_t y = 0; y < height; ++y) {
        const uint16_t* row = labels.data() + static_cast<std::size_t>(y) * width;
        int32_t x = 0;
        while (x < width) {
            uint16_t v = row[x];
            int32_t x0 = x;
            while (x < width && row[x] == v)
                ++x;
            if (v == 0)
                continue;
            Acc& a = acc[static_cast<int32_t>(v)];
            a.runs.push_back({y, x0, x});
            int64_t n = x - x0;
            a.area += n;
            // sum of x0..x-1
            a.sum_x += n * (x0 + x - 1) / 2;
            a.sum_y += n * y;
            if (a.max_y < a.min_y) {  // first run
                a.min_x = x0;
                a.max_x = x - 1;
                a.min_y = a.max_y = y;
            } else {
                a.min_x = std::min(a.min_x, x0);
                a.max_x = std::max(a.max_x, x - 1);
                a.min_y = std::min(a.min_y, y);
                a.max_y = std::max(a.max_y, y);
            }
        }
    }

    LabelFrame f;
    f.index_ = index;
    f.width_ = width;
    f.height_ = height;
    f.detections_.reserve(acc.size());
    for (auto& [label, a] : acc) {
        Detection d;
        d.frame = index;
        d.label = label;
        d.area = a.area;
        d.cx = static_cast<double>(a.sum_x) / static_cast<double>(a.area);
        d.cy = static_cast<double>(a.sum_y) / static_cast<double>(a.area);
        d.min_x = a.min_x;
        d.min_y = a.min_y;
        d.max_x = a.max_x;
        d.max_y = a.max_y;
        d.runs = std::move(a.runs);
        f.detections_.push_back(std::move(d));
    }
    return f;
}

const Detection* LabelFrame::find(int32_t label) const {
    auto it = std::lower_bound(detections_.begin(), detections_.end(), label,
                               [](const Detection& d, int32_t l) { return d.label < l; });
    if (it == detections_.end() || it->label != label)
        return nullptr;
    return &*it;
}

std::vector<uint16_t> LabelFrame::rasterize() const {
    std::vector<uint16_t> out(static_cast<std::size_t>(width_) * height_, 0);
    for (const Detection& d : detections_)
        for (const PixelRun& r : d.runs) {
            uint16_t* row = out.data() + static_cast<std::size_t>(r.y) * width_;
            std::fill(row + r.x_begin, row + r.x_end, static_cast<uint16_t>(d.label));
        }
    return out;
}

void LabelFrame::set_index(int32_t index) {
    index_ = index;
    for (Detection& d : detections_)
        d.frame = index;
}

// ---------------------------------------------------------------------------
// LineageGraph

void LineageGraph::add_node(NodeKey key) {
    if (key.frame < 0)
        throw StructureError("node " + key.str() + " has a negative frame index");
    if (key.label < 1)
        throw StructureError("node " + key.str() + " uses reserved label (labels start at 1)");
    if (!nodes_.insert(key.packed()).second)
        return;  // idempotent
    if (key.frame >= frame_count_) {
        frame_count_ = key.frame + 1;
        if (by_frame_.size() < static_cast<std::size_t>(frame_count_))
            by_frame_.resize(frame_count_);
    }
    by_frame_[key.frame].push_back(key.label);
    sorted_ = false;
}

void LineageGraph::add_edge(NodeKey parent, NodeKey child) {
    if (!has_node(parent))
        throw StructureError("edge parent " + parent.str() + " is not a node");
    if (!has_node(child))
        throw StructureError("edge child " + child.str() + " is not a node");
    if (parent.frame >= child.frame)
        throw StructureError("edge " + parent.str() + " -> " + child.str() +
                             " does not go forward in time");
    auto [it, inserted] = parent_.emplace(child.packed(), parent);
    if (!inserted) {
        if (it->second == parent)
            return;  // idempotent
        throw StructureError("node " + child.str() + " has two parents: " +
                             it->second.str() + " and " + parent.str());
    }
    children_[parent.packed()].push_back(child);
    sorted_ = false;
}

void LineageGraph::finalize() {
    for (auto& labels : by_frame_)
        std::sort(labels.begin(), labels.end());
    for (auto& [k, kids] : children_)
        std::sort(kids.begin(), kids.end());
    sorted_ = true;
}

void LineageGraph::ensure_sorted() const {
    if (!sorted_)
        const_cast<LineageGraph*>(this)->finalize();
}

bool LineageGraph::has_node(NodeKey key) const {
    return nodes_.contains(key.packed());
}

bool LineageGraph::has_edge(NodeKey parent, NodeKey child) const {
    auto it = parent_.find(child.packed());
    return it != parent_.end() && it->second == parent;
}

int LineageGraph::out_degree(NodeKey key) const {
    auto it = children_.find(key.packed());
    return it == children_.end() ? 0 : static_cast<int>(it->second.size());
}

std::span<const NodeKey> LineageGraph::children(NodeKey key) const {
    ensure_sorted();
    auto it = children_.find(key.packed());
    if (it == children_.end())
        return {};
    return it->second;
}

std::optional<NodeKey> LineageGraph::parent(NodeKey key) const {
    auto it = parent_.find(key.packed());
    if (it == parent_.end())
        return std::nullopt;
    return it->second;
}

const std::vector<int32_t>& LineageGraph::labels_at(int32_t frame) const {
    static const std::vector<int32_t> kEmpty;
    ensure_sorted();
    if (frame < 0 || frame >= static_cast<int32_t>(by_frame_.size()))
        return kEmpty;
    return by_frame_[frame];
}

std::vector<NodeKey> LineageGraph::nodes_sorted() const {
    ensure_sorted();
    std::vector<NodeKey> out;
    out.reserve(nodes_.size());
    for (int32_t f = 0; f < frame_count_; ++f)
        for (int32_t l : by_frame_[f])
            out.push_back({f, l});
    return out;
}

std::vector<std::pair<NodeKey, NodeKey>> LineageGraph::edges_sorted() const {
    ensure_sorted();
    std::vector<std::pair<NodeKey, NodeKey>> out;
    out.reserve(parent_.size());
    for (int32_t f = 0; f < frame_count_; ++f)
        for (int32_t l : by_frame_[f])
            for (NodeKey c : children({f, l}))
                out.emplace_back(NodeKey{f, l}, c);
    return out;
}

// ---------------------------------------------------------------------------
// Track decomposition

namespace {

bool starts_track(const LineageGraph& g, NodeKey v) {
    auto p = g.parent(v);
    if (!p)
        return true;
    if (g.out_degree(*p) >= 2)
        return true;          // division child
    return p->frame + 1 != v.frame;  // frame gap
}

} // namespace

std::vector<Track> build_tracks(const LineageGraph& graph) {
    std::vector<Track> tracks;
    std::unordered_map<uint64_t, int32_t> track_of_last;  // last member -> track id

    for (NodeKey start : graph.nodes_sorted()) {
        if (!starts_track(graph, start))
            continue;
        Track t;
        t.id = static_cast<int32_t>(tracks.size()) + 1;
        t.members.push_back(start);
        NodeKey cur = start;
        for (;;) {
            auto kids = graph.children(cur);
            if (kids.size() != 1 || kids[0].frame != cur.frame + 1)
                break;
            cur = kids[0];
            t.members.push_back(cur);
        }
        t.begin_frame = start.frame;
        t.end_frame = cur.frame;
        track_of_last.emplace(cur.packed(), t.id);
        tracks.push_back(std::move(t));
    }

    for (Track& t : tracks) {
        auto p = graph.parent(t.members.front());
        if (p)
            t.parent_track = track_of_last.at(p->packed());
    }
    return tracks;
}

std::vector<NodeKey> validate_binary_divisions(const LineageGraph& graph) {
    std::vector<NodeKey> out;
    for (NodeKey v : graph.nodes_sorted())
        if (graph.out_degree(v) > 2)
            out.push_back(v);
    return out;
}

GraphStats graph_stats(const LineageGraph& graph) {
    GraphStats s;
    s.instances = static_cast<int64_t>(graph.node_count());
    s.tracks = static_cast<int64_t>(build_tracks(graph).size());
    const int32_t last = graph.frame_count() - 1;
    s.cells_per_frame.assign(graph.frame_count(), 0);
    for (int32_t f = 0; f < graph.frame_count(); ++f) {
        const auto& labels = graph.labels_at(f);
        s.cells_per_frame[f] = static_cast<int64_t>(labels.size());
        for (int32_t l : labels) {
            int deg = graph.out_degree({f, l});
            if (deg >= 2)
                ++s.divisions;
            else if (deg == 0 && f < last)
                ++s.disappearances;
        }
    }
    return s;
}

} // namespace mlct
