#include <doctest.h>

#include "helpers.hpp"
#include "mlct/matching.hpp"

using namespace mlct;
using namespace mlct::testing;

namespace {

LabelFrame frame_of(int32_t idx, int32_t w, int32_t h, std::vector<uint16_t> raster) {
    return LabelFrame::from_raster(idx, w, h, raster);
}

} // namespace

TEST_CASE("identical frames match one-to-one") {
    LabelFrame f = frame_of(0, 4, 1, {1, 1, 2, 0});
    FrameMatching m = match_one_frame(f, f);
    CHECK(m.gt_to_pred.at(1) == 1);
    CHECK(m.gt_to_pred.at(2) == 2);
    CHECK(m.unmatched_gt.empty());
    CHECK(m.unmatched_pred.empty());
}

TEST_CASE("one predicted region fully covering two cells is a split site") {
    LabelFrame gt = frame_of(0, 4, 1, {1, 1, 2, 2});
    LabelFrame pred = frame_of(0, 4, 1, {9, 9, 9, 9});
    FrameMatching m = match_one_frame(gt, pred);
    CHECK(m.gt_to_pred.at(1) == 9);
    CHECK(m.gt_to_pred.at(2) == 9);
    CHECK(m.pred_to_gt.at(9) == std::vector<int32_t>{1, 2});
    CHECK(m.unmatched_gt.empty());
    CHECK(m.unmatched_pred.empty());
}

TEST_CASE("exactly half coverage does not match") {
    LabelFrame gt = frame_of(0, 4, 1, {1, 1, 0, 0});
    LabelFrame pred = frame_of(0, 4, 1, {7, 0, 0, 0});  // covers 1 of 2 pixels
    FrameMatching m = match_one_frame(gt, pred);
    CHECK(m.gt_to_pred.empty());
    CHECK(m.unmatched_gt == std::vector<int32_t>{1});
    CHECK(m.unmatched_pred == std::vector<int32_t>{7});
}

TEST_CASE("majority coverage matches uniquely") {
    LabelFrame gt = frame_of(0, 4, 1, {1, 1, 1, 0});
    LabelFrame pred = frame_of(0, 4, 1, {7, 7, 8, 8});  // 7 covers 2/3
    FrameMatching m = match_one_frame(gt, pred);
    CHECK(m.gt_to_pred.at(1) == 7);
    CHECK(m.unmatched_pred == std::vector<int32_t>{8});
}

TEST_CASE("dimension mismatch is an input error") {
    SegmentationSequence a, b;
    a.frames.push_back(frame_of(0, 2, 1, {1, 0}));
    b.frames.push_back(frame_of(0, 3, 1, {1, 0, 0}));
    CHECK_THROWS_AS(match_frames(a, b), InputError);
    SegmentationSequence c;
    CHECK_THROWS_AS(match_frames(a, c), InputError);
}

TEST_CASE("self matching is a perfect bijection; identity path agrees") {
    for (uint64_t seed : {3u, 4u, 5u}) {
        LineageGraph g = random_lineage(seed);
        SegmentationSequence seq = sequence_for(g);
        NodeMatching general = match_frames(seq, seq);
        NodeMatching serial = match_frames_serial(seq, seq);
        NodeMatching fast = identity_matching(seq);

        CHECK(general.false_negatives() == 0);
        CHECK(general.false_positives() == 0);
        CHECK(general.matched_count() == static_cast<int64_t>(g.node_count()));

        REQUIRE(general.frames.size() == serial.frames.size());
        REQUIRE(general.frames.size() == fast.frames.size());
        for (std::size_t f = 0; f < general.frames.size(); ++f) {
            CHECK(general.frames[f].gt_to_pred == serial.frames[f].gt_to_pred);
            CHECK(general.frames[f].unmatched_gt == serial.frames[f].unmatched_gt);
            CHECK(general.frames[f].unmatched_pred == serial.frames[f].unmatched_pred);
            CHECK(general.frames[f].gt_to_pred == fast.frames[f].gt_to_pred);
            CHECK(general.frames[f].pred_to_gt == fast.frames[f].pred_to_gt);
        }
    }
}

TEST_CASE("per-frame accounting: matched + unmatched covers the GT node set") {
    TestRng rng(77);
    for (int it = 0; it < 10; ++it) {
        // random GT and an independently random prediction over the same canvas
        const int32_t w = 16, h = 16;
        auto random_frame = [&](int32_t idx) {
            std::vector<uint16_t> raster(w * h, 0);
            const int blobs = rng.uniform_int(1, 6);
            for (int b = 1; b <= blobs; ++b) {
                const int32_t cx = rng.uniform_int(1, w - 2);
                const int32_t cy = rng.uniform_int(1, h - 2);
                for (int32_t dy = -1; dy <= 1; ++dy)
                    for (int32_t dx = -1; dx <= 1; ++dx)
                        raster[(cy + dy) * w + cx + dx] = static_cast<uint16_t>(b);
            }
            return frame_of(idx, w, h, raster);
        };
        LabelFrame gt = random_frame(0);
        LabelFrame pred = random_frame(0);
        FrameMatching m = match_one_frame(gt, pred);
        CHECK(m.gt_to_pred.size() + m.unmatched_gt.size() == gt.detections().size());
        // no GT region may match two predictions: map values are single
        std::size_t total_matched = 0;
        for (const auto& [p, gts] : m.pred_to_gt)
            total_matched += gts.size();
        CHECK(total_matched == m.gt_to_pred.size());
    }
}
