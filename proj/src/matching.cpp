#include "mlct/matching.hpp"

#include <algorithm>
#include <cstring>

namespace mlct {

std::optional<NodeKey> NodeMatching::pred_for(NodeKey gt) const {
    if (gt.frame < 0 || gt.frame >= static_cast<int32_t>(frames.size()))
        return std::nullopt;
    const auto& m = frames[gt.frame].gt_to_pred;
    auto it = m.find(gt.label);
    if (it == m.end())
        return std::nullopt;
    return NodeKey{gt.frame, it->second};
}

int64_t NodeMatching::matched_count() const {
    int64_t n = 0;
    for (const FrameMatching& f : frames)
        n += static_cast<int64_t>(f.gt_to_pred.size());
    return n;
}

int64_t NodeMatching::false_negatives() const {
    int64_t n = 0;
    for (const FrameMatching& f : frames)
        n += static_cast<int64_t>(f.unmatched_gt.size());
    return n;
}

int64_t NodeMatching::false_positives() const {
    int64_t n = 0;
    for (const FrameMatching& f : frames)
        n += static_cast<int64_t>(f.unmatched_pred.size());
    return n;
}

FrameMatching match_one_frame(const LabelFrame& gt, const LabelFrame& pred) {
    if (gt.width() != pred.width() || gt.height() != pred.height())
        throw InputError("frame " + std::to_string(gt.index()) +
                         ": ground truth and prediction dimensions differ");

    FrameMatching out;
    const std::vector<uint16_t> pred_raster = pred.rasterize();
    const int32_t w = gt.width();

    for (const Detection& d : gt.detections()) {
        // overlap pixel counts against every predicted region under d
        std::unordered_map<int32_t, int64_t> overlap;
        for (const PixelRun& r : d.runs) {
            const uint16_t* row = pred_raster.data() + static_cast<std::size_t>(r.y) * w;
            for (int32_t x = r.x_begin; x < r.x_end; ++x)
                if (row[x] != 0)
                    ++overlap[row[x]];
        }
        // strict majority of the GT pixels: at most one candidate can qualify
        int32_t best = 0;
        for (auto [p, n] : overlap)
            if (2 * n > d.area) {
                best = p;
                break;
            }
        if (best != 0) {
            out.gt_to_pred.emplace(d.label, best);
            out.pred_to_gt[best].push_back(d.label);
        } else {
            out.unmatched_gt.push_back(d.label);
        }
    }

    for (auto& [p, gts] : out.pred_to_gt)
        std::sort(gts.begin(), gts.end());
    for (const Detection& d : pred.detections())
        if (!out.pred_to_gt.contains(d.label))
            out.unmatched_pred.push_back(d.label);
    std::sort(out.unmatched_gt.begin(), out.unmatched_gt.end());
    std::sort(out.unmatched_pred.begin(), out.unmatched_pred.end());
    return out;
}

namespace {

void check_compatible(const SegmentationSequence& gt, const SegmentationSequence& pred) {
    if (gt.frames.size() != pred.frames.size())
        throw InputError("sequences differ in frame count: " +
                         std::to_string(gt.frames.size()) + " vs " +
                         std::to_string(pred.frames.size()));
}

} // namespace

NodeMatching match_frames_serial(const SegmentationSequence& gt,
                                 const SegmentationSequence& pred) {
    check_compatible(gt, pred);
    NodeMatching m;
    m.frames.resize(gt.frames.size());
    for (std::size_t f = 0; f < gt.frames.size(); ++f)
        m.frames[f] = match_one_frame(gt.frames[f], pred.frames[f]);
    return m;
}

NodeMatching match_frames(const SegmentationSequence& gt, const SegmentationSequence& pred) {
    check_compatible(gt, pred);
    NodeMatching m;
    const int64_t n = static_cast<int64_t>(gt.frames.size());
    m.frames.resize(n);
    std::string error;
#pragma omp parallel for schedule(dynamic)
    for (int64_t f = 0; f < n; ++f) {
        try {
            m.frames[f] = match_one_frame(gt.frames[f], pred.frames[f]);
        } catch (const std::exception& e) {
#pragma omp critical
            error = e.what();
        }
    }
    if (!error.empty())
        throw InputError(error);
    return m;
}

NodeMatching identity_matching(const SegmentationSequence& seq) {
    NodeMatching m;
    m.frames.resize(seq.frames.size());
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
        FrameMatching& fm = m.frames[f];
        for (const Detection& d : seq.frames[f].detections()) {
            fm.gt_to_pred.emplace(d.label, d.label);
            fm.pred_to_gt[d.label].push_back(d.label);
        }
    }
    return m;
}

} // namespace mlct
