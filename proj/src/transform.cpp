#include "mlct/transform.hpp"

#include <algorithm>
#include <cmath>

namespace mlct {

namespace {

std::vector<int32_t> retained_frames(int64_t total, const ExperimentSpec& spec) {
    if (spec.k < 1)
        throw InputError("subsampling factor must be >= 1");
    if (spec.n_max < 1)
        throw InputError("cell count limit must be >= 1");
    if (spec.frame_offset < 0 || spec.frame_offset >= spec.k)
        throw InputError("frame offset must lie in [0, k)");
    std::vector<int32_t> out;
    for (int64_t f = spec.frame_offset; f < total; f += spec.k)
        out.push_back(static_cast<int32_t>(f));
    return out;
}

void truncate_by_count(std::vector<int32_t>& retained, const SegmentationSequence& seq,
                       const ExperimentSpec& spec) {
    if (spec.n_max == kUnlimitedCells)
        return;
    auto count = [&](int32_t f) {
        return static_cast<int64_t>(seq.frames[f].detections().size());
    };
    if (spec.truncation == TruncationRule::Prefix) {
        std::size_t keep = 0;
        while (keep < retained.size() && count(retained[keep]) <= spec.n_max)
            ++keep;
        retained.resize(keep);
    } else {
        std::size_t last = 0;  // one past the last compliant frame
        for (std::size_t i = 0; i < retained.size(); ++i)
            if (count(retained[i]) <= spec.n_max)
                last = i + 1;
        retained.resize(last);
    }
    if (retained.empty())
        throw EmptyConditionError("first retained frame already exceeds the cell count limit");
}

} // namespace

TransformResult subsample(const SegmentationSequence& seq, const LineageGraph& gt,
                          const ExperimentSpec& spec) {
    if (seq.frames.empty())
        throw InputError("cannot subsample an empty sequence");

    std::vector<int32_t> retained = retained_frames(static_cast<int64_t>(seq.frames.size()), spec);
    if (retained.empty())
        throw EmptyConditionError("no frames retained at offset " +
                                  std::to_string(spec.frame_offset) + ", k=" +
                                  std::to_string(spec.k));
    truncate_by_count(retained, seq, spec);

    TransformResult out;
    out.frame_map = retained;
    out.seq.frame_interval_minutes = seq.frame_interval_minutes * spec.k;
    out.seq.frames.reserve(retained.size());
    for (std::size_t i = 0; i < retained.size(); ++i) {
        LabelFrame f = seq.frames[retained[i]];
        f.set_index(static_cast<int32_t>(i));
        out.seq.frames.push_back(std::move(f));
    }

    // Nodes: every detection on a retained frame.
    const int32_t m = static_cast<int32_t>(retained.size());
    for (int32_t i = 0; i < m; ++i)
        for (int32_t label : gt.labels_at(retained[i]))
            out.graph.add_node({i, label});

    // Induced edges per consecutive retained pair. Transitions are
    // independent, and ancestor paths never branch backward (in-degree <= 1),
    // so the per-transition walks can run in parallel.
    std::vector<std::vector<std::pair<int32_t, int32_t>>> edges(std::max(0, m - 1));
#pragma omp parallel for schedule(dynamic)
    for (int32_t i = 0; i < m - 1; ++i) {
        const int32_t from = retained[i];
        const int32_t to = retained[i + 1];
        std::vector<NodeKey> stack;
        for (int32_t label : gt.labels_at(from)) {
            stack.assign(1, NodeKey{from, label});
            while (!stack.empty()) {
                NodeKey u = stack.back();
                stack.pop_back();
                for (NodeKey w : gt.children(u)) {
                    if (w.frame == to)
                        edges[i].emplace_back(label, w.label);
                    else if (w.frame < to)
                        stack.push_back(w);
                    // w.frame > to: the path overshot the next retained frame
                }
            }
        }
    }
    for (int32_t i = 0; i < m - 1; ++i)
        for (auto [from_label, to_label] : edges[i])
            out.graph.add_edge({i, from_label}, {i + 1, to_label});
    out.graph.finalize();
    return out;
}

namespace {

std::vector<double> ema(const std::vector<double>& x, double alpha) {
    std::vector<double> s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        s[i] = i == 0 ? x[0] : alpha * x[i] + (1.0 - alpha) * s[i - 1];
    return s;
}

} // namespace

std::vector<IntervalStats> interval_stats(const SegmentationSequence& seq,
                                          const LineageGraph& gt,
                                          const std::vector<int>& k_values,
                                          double smoothing) {
    std::vector<IntervalStats> out;
    out.reserve(k_values.size());
    for (int k : k_values) {
        ExperimentSpec spec;
        spec.k = k;
        TransformResult tr = subsample(seq, gt, spec);
        const LineageGraph& g = tr.graph;
        const int32_t m = static_cast<int32_t>(tr.seq.frames.size());

        IntervalStats st;
        st.k = k;
        st.smoothing = smoothing;
        const int32_t transitions = std::max(0, m - 1);
        st.divisions.assign(transitions, 0.0);
        st.disappearances.assign(transitions, 0.0);
        st.mean_displacement.assign(transitions, 0.0);

        for (int32_t i = 0; i < transitions; ++i) {
            int64_t links = 0;
            int64_t div_links = 0;
            double displacement = 0.0;
            for (int32_t label : g.labels_at(i)) {
                NodeKey u{i, label};
                const int deg = g.out_degree(u);
                if (deg >= 2)
                    st.divisions[i] += 1.0;
                else if (deg == 0)
                    st.disappearances[i] += 1.0;
                if (deg == 0)
                    continue;
                const Detection* du = tr.seq.frames[i].find(label);
                for (NodeKey v : g.children(u)) {
                    const Detection* dv = tr.seq.frames[v.frame].find(v.label);
                    displacement += std::hypot(dv->cx - du->cx, dv->cy - du->cy);
                    ++links;
                    if (deg >= 2)
                        ++div_links;
                }
            }
            st.mean_displacement[i] = links > 0 ? displacement / static_cast<double>(links) : 0.0;
            st.total_links += links;
            st.division_links += div_links;
        }
        st.division_fraction = st.total_links > 0
            ? static_cast<double>(st.division_links) / static_cast<double>(st.total_links)
            : 0.0;
        if (transitions > 0) {
            st.divisions_smoothed = ema(st.divisions, smoothing);
            st.disappearances_smoothed = ema(st.disappearances, smoothing);
            st.mean_displacement_smoothed = ema(st.mean_displacement, smoothing);
        }
        out.push_back(std::move(st));
    }
    return out;
}

} // namespace mlct
