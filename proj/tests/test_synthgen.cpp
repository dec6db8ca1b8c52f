#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "mlct/io.hpp"
#include "mlct/synthgen.hpp"

using namespace mlct;

TEST_CASE("a lone non-dividing cell is one track of one node per frame") {
    ColonyParams p;
    p.seed = 3;
    p.frames = 10;
    p.division_time_mean = 1e6;  // effectively never divides
    p.division_time_jitter = 0;
    Colony c = generate(p);
    REQUIRE(!c.truncated);
    CHECK(c.seq.frames.size() == 10);
    CHECK(c.graph.node_count() == 10);
    auto tracks = build_tracks(c.graph);
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].members.size() == 10);
    CHECK(graph_stats(c.graph).divisions == 0);
}

TEST_CASE("jitter-free division every 5 frames over 11 frames: 1+2+4 lineage") {
    ColonyParams p;
    p.seed = 9;
    p.frames = 11;
    p.division_time_mean = 5;
    p.division_time_jitter = 0;
    p.width = 320;
    p.height = 240;
    Colony c = generate(p);
    REQUIRE(!c.truncated);
    GraphStats s = graph_stats(c.graph);
    CHECK(s.divisions == 3);
    CHECK(s.tracks == 7);
    CHECK(s.instances == 5 + 2 * 5 + 4 * 1);
    CHECK(validate_binary_divisions(c.graph).empty());
}

TEST_CASE("masks are disjoint per frame and tracks overlap across frames") {
    ColonyParams p;
    p.seed = 17;
    p.frames = 30;
    p.division_time_mean = 8;
    p.division_time_jitter = 2;
    p.growth_rate = 0.5;  // below rod width
    Colony c = generate(p);
    REQUIRE(!c.truncated);

    // disjointness is structural (one label per pixel); check detections add up
    for (const LabelFrame& f : c.seq.frames) {
        int64_t area = 0;
        for (const Detection& d : f.detections())
            area += d.area;
        int64_t nonzero = 0;
        for (uint16_t v : f.rasterize())
            if (v)
                ++nonzero;
        CHECK(area == nonzero);
    }

    // consecutive masks of one cell share at least one pixel
    for (auto [a, b] : c.graph.edges_sorted()) {
        if (a.label != b.label)
            continue;  // track continuation only
        const Detection* da = c.seq.frames[a.frame].find(a.label);
        const Detection* db = c.seq.frames[b.frame].find(b.label);
        REQUIRE(da);
        REQUIRE(db);
        std::set<std::pair<int32_t, int32_t>> pixels;
        for (const PixelRun& r : da->runs)
            for (int32_t x = r.x_begin; x < r.x_end; ++x)
                pixels.emplace(r.y, x);
        bool overlap = false;
        for (const PixelRun& r : db->runs)
            for (int32_t x = r.x_begin; x < r.x_end && !overlap; ++x)
                overlap = pixels.contains({r.y, x});
        CHECK(overlap);
    }
}

TEST_CASE("the same seed reproduces the dataset byte for byte") {
    ColonyParams p;
    p.seed = 23;
    p.frames = 20;
    p.division_time_mean = 6;
    Colony a = generate(p);
    Colony b = generate(p);
    REQUIRE(a.seq.frames.size() == b.seq.frames.size());
    for (std::size_t f = 0; f < a.seq.frames.size(); ++f) {
        std::ostringstream wa(std::ios::binary), wb(std::ios::binary);
        write_label_frame(a.seq.frames[f], wa);
        write_label_frame(b.seq.frames[f], wb);
        CHECK(wa.str() == wb.str());
    }
    std::ostringstream ta, tb;
    write_lineage_table(a.graph, ta);
    write_lineage_table(b.graph, tb);
    CHECK(ta.str() == tb.str());
}

TEST_CASE("ground truth satisfies lineage invariants with binary divisions") {
    for (uint64_t seed = 100; seed < 110; ++seed) {
        ColonyParams p;
        p.seed = seed;
        p.frames = 40;
        p.division_time_mean = 9;
        p.division_time_jitter = 2;
        Colony c = generate(p);
        CHECK(validate_binary_divisions(c.graph).empty());
        // node count equals total detections
        std::size_t detections = 0;
        for (const LabelFrame& f : c.seq.frames)
            detections += f.detections().size();
        CHECK(c.graph.node_count() == detections);
    }
}

TEST_CASE("cell count grows exponentially with doubling time near the division time") {
    ColonyParams p;
    p.seed = 41;
    p.frames = 60;
    p.division_time_mean = 10;
    p.division_time_jitter = 1.5;
    p.width = 420;
    p.height = 300;
    Colony c = generate(p);
    REQUIRE(!c.truncated);
    REQUIRE(c.seq.frames.size() == 60);

    // linear regression of log2(count) on frame index
    const int n = 60;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int f = 0; f < n; ++f) {
        const double x = f;
        const double y = std::log2(static_cast<double>(c.seq.frames[f].detections().size()));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double r = (n * sxy - sx * sy) /
                     std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    CHECK(r * r > 0.95);
    const double doubling = 1.0 / slope;
    CHECK(doubling == doctest::Approx(p.division_time_mean).epsilon(0.25));
}

TEST_CASE("invalid parameters are rejected") {
    ColonyParams p;
    p.division_time_mean = 1.0;
    CHECK_THROWS_AS(generate(p), InputError);
    ColonyParams q;
    q.width = 0;
    CHECK_THROWS_AS(generate(q), InputError);
}
