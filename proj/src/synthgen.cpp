#include "mlct/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace mlct {

namespace {

// Uniform doubles straight from the engine bits; std:: distributions are
// implementation-defined, this is not.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

struct Rod {
    int32_t id = 0;
    double x = 0.0, y = 0.0;  // center
    double angle = 0.0;       // radians
    double length = 0.0;      // cap-center to cap-center
    int32_t divide_at = 0;    // frame of the next division
};

struct Endpoints {
    double ax, ay, bx, by;
};

Endpoints endpoints(const Rod& c) {
    const double hx = 0.5 * c.length * std::cos(c.angle);
    const double hy = 0.5 * c.length * std::sin(c.angle);
    return {c.x - hx, c.y - hy, c.x + hx, c.y + hy};
}

// Squared distance between two segments, for capsule collision.
double segment_dist2(const Endpoints& p, const Endpoints& q) {
    auto clamp01 = [](double t) { return std::clamp(t, 0.0, 1.0); };
    const double d1x = p.bx - p.ax, d1y = p.by - p.ay;
    const double d2x = q.bx - q.ax, d2y = q.by - q.ay;
    const double rx = p.ax - q.ax, ry = p.ay - q.ay;
    const double a = d1x * d1x + d1y * d1y;
    const double e = d2x * d2x + d2y * d2y;
    const double f = d2x * rx + d2y * ry;
    double s, t;
    if (a <= 1e-12 && e <= 1e-12) {
        s = t = 0.0;
    } else if (a <= 1e-12) {
        s = 0.0;
        t = clamp01(f / e);
    } else {
        const double c = d1x * rx + d1y * ry;
        if (e <= 1e-12) {
            t = 0.0;
            s = clamp01(-c / a);
        } else {
            const double b = d1x * d2x + d1y * d2y;
            const double denom = a * e - b * b;
            s = denom > 1e-12 ? clamp01((b * f - c * e) / denom) : 0.0;
            t = clamp01((b * s + f) / e);
            s = clamp01((b * t - c) / a);
        }
    }
    const double cx = p.ax + d1x * s - (q.ax + d2x * t);
    const double cy = p.ay + d1y * s - (q.ay + d2y * t);
    return cx * cx + cy * cy;
}

double point_segment_dist(double px, double py, const Endpoints& s) {
    const double dx = s.bx - s.ax, dy = s.by - s.ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 1e-12 ? ((px - s.ax) * dx + (py - s.ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double cx = s.ax + dx * t - px;
    const double cy = s.ay + dy * t - py;
    return std::sqrt(cx * cx + cy * cy);
}

int32_t sample_interval(Rng& rng, const ColonyParams& p) {
    const double t = p.division_time_mean + rng.uniform(-p.division_time_jitter,
                                                        p.division_time_jitter);
    return std::max<int32_t>(1, static_cast<int32_t>(std::lround(t)));
}

// Push overlapping capsules apart; walls are solid top/bottom, open left/right.
void relax(std::vector<Rod>& cells, double radius, double height) {
    const double min_dist = 2.0 * radius;
    for (int iter = 0; iter < 40; ++iter) {
        bool moved = false;
        for (std::size_t i = 0; i < cells.size(); ++i)
            for (std::size_t j = i + 1; j < cells.size(); ++j) {
                Rod& a = cells[i];
                Rod& b = cells[j];
                const double reach = 0.5 * (a.length + b.length) + min_dist;
                if (std::abs(a.x - b.x) > reach || std::abs(a.y - b.y) > reach)
                    continue;
                const double d2 = segment_dist2(endpoints(a), endpoints(b));
                if (d2 >= min_dist * min_dist)
                    continue;
                const double d = std::sqrt(d2);
                double nx = b.x - a.x, ny = b.y - a.y;
                double nl = std::hypot(nx, ny);
                if (nl < 1e-9) {  // coincident centers: deterministic fallback
                    nx = std::cos(a.angle + 1.5707963267948966);
                    ny = std::sin(a.angle + 1.5707963267948966);
                    nl = 1.0;
                }
                const double push = 0.5 * (min_dist - d) + 0.05;
                a.x -= push * nx / nl;
                a.y -= push * ny / nl;
                b.x += push * nx / nl;
                b.y += push * ny / nl;
                moved = true;
            }
        for (Rod& c : cells) {
            Endpoints e = endpoints(c);
            const double lo = std::min(e.ay, e.by) - radius;
            const double hi = std::max(e.ay, e.by) + radius;
            if (lo < 0.0) {
                c.y -= lo;
                moved = true;
            } else if (hi > height) {
                c.y -= hi - height;
                moved = true;
            }
        }
        if (!moved)
            break;
    }
}

} // namespace

Colony generate(const ColonyParams& p) {
    if (p.width <= 0 || p.height <= 0 || p.frames <= 0 || p.initial_cells <= 0 ||
        p.rod_length <= 0.0 || p.rod_width <= 0.0 || p.growth_rate < 0.0)
        throw InputError("colony parameters must be positive");
    if (p.division_time_mean < 2.0)
        throw InputError("division time must be at least 2 frames");

    Rng rng(p.seed);
    const double radius = 0.5 * p.rod_width;

    Colony out;
    std::vector<Rod> cells;
    int32_t next_id = 1;
    for (int i = 0; i < p.initial_cells; ++i) {
        Rod c;
        c.id = next_id++;
        c.x = p.width * (i + 1.0) / (p.initial_cells + 1.0);
        c.y = 0.5 * p.height + rng.uniform(-0.1, 0.1) * p.height;
        c.angle = rng.uniform(-0.2, 0.2);
        c.length = p.rod_length * rng.uniform(0.7, 1.0);
        c.divide_at = sample_interval(rng, p);
        cells.push_back(c);
    }

    std::vector<std::pair<int32_t, int32_t>> born;  // (daughter, mother) this frame
    for (int32_t frame = 0; frame < p.frames; ++frame) {
        born.clear();
        if (frame > 0) {
            for (Rod& c : cells)
                c.length += p.growth_rate;

            std::vector<Rod> next;
            next.reserve(cells.size());
            for (const Rod& c : cells) {
                if (frame < c.divide_at) {
                    next.push_back(c);
                    continue;
                }
                // snapping division: two half-length daughters, each rotated
                const double ux = std::cos(c.angle);
                const double uy = std::sin(c.angle);
                const double snap = p.snap_angle_deg * 3.141592653589793 / 180.0;
                for (int d = 0; d < 2; ++d) {
                    Rod child;
                    child.id = next_id++;
                    const double side = d == 0 ? -1.0 : 1.0;
                    child.x = c.x + side * 0.25 * c.length * ux;
                    child.y = c.y + side * 0.25 * c.length * uy;
                    child.angle = c.angle + side * snap * rng.uniform(0.5, 1.0);
                    child.length = 0.5 * c.length * 0.9;
                    child.divide_at = frame + sample_interval(rng, p);
                    born.emplace_back(child.id, c.id);
                    next.push_back(child);
                }
            }
            cells = std::move(next);
        }

        relax(cells, radius, p.height);

        // exit rule: any part crossing the left/right border disappears
        std::erase_if(cells, [&](const Rod& c) {
            Endpoints e = endpoints(c);
            const double lo = std::min(e.ax, e.bx) - radius;
            const double hi = std::max(e.ax, e.bx) + radius;
            return lo < 0.0 || hi > p.width;
        });
        if (cells.empty()) {
            out.truncated = true;
            out.warning = "colony died out or left the chamber at frame " +
                          std::to_string(frame);
            break;
        }
        if (next_id > 65535)
            throw InputError("colony exceeded 65535 cells; shrink the run");

        // rasterize: each pixel goes to the nearest covering capsule
        const std::size_t npx = static_cast<std::size_t>(p.width) * p.height;
        std::vector<uint16_t> raster(npx, 0);
        std::vector<float> best(npx, 0.0f);
        for (const Rod& c : cells) {
            const Endpoints e = endpoints(c);
            const int32_t x0 = std::max<int32_t>(0, static_cast<int32_t>(std::floor(
                                   std::min(e.ax, e.bx) - radius - 1)));
            const int32_t x1 = std::min<int32_t>(p.width - 1, static_cast<int32_t>(std::ceil(
                                   std::max(e.ax, e.bx) + radius + 1)));
            const int32_t y0 = std::max<int32_t>(0, static_cast<int32_t>(std::floor(
                                   std::min(e.ay, e.by) - radius - 1)));
            const int32_t y1 = std::min<int32_t>(p.height - 1, static_cast<int32_t>(std::ceil(
                                   std::max(e.ay, e.by) + radius + 1)));
            for (int32_t y = y0; y <= y1; ++y)
                for (int32_t x = x0; x <= x1; ++x) {
                    const double d = point_segment_dist(x, y, e) - radius;
                    if (d > 0.0)
                        continue;
                    const std::size_t idx = static_cast<std::size_t>(y) * p.width + x;
                    if (raster[idx] == 0 || d < best[idx]) {
                        raster[idx] = static_cast<uint16_t>(c.id);
                        best[idx] = static_cast<float>(d);
                    }
                }
        }

        LabelFrame lf = LabelFrame::from_raster(frame, p.width, p.height, raster);
        if (lf.detections().size() != cells.size()) {
            out.truncated = true;
            out.warning = "chamber overflow at frame " + std::to_string(frame) +
                          ": a cell could not be placed";
            break;
        }

        for (const Rod& c : cells)
            out.graph.add_node({frame, c.id});
        if (frame > 0) {
            for (const Rod& c : cells)
                if (out.graph.has_node({frame - 1, c.id}))
                    out.graph.add_edge({frame - 1, c.id}, {frame, c.id});
            for (auto [daughter, mother] : born)
                if (out.graph.has_node({frame, daughter}) &&
                    out.graph.has_node({frame - 1, mother}))
                    out.graph.add_edge({frame - 1, mother}, {frame, daughter});
        }
        out.seq.frames.push_back(std::move(lf));
    }

    if (out.seq.frames.empty())
        throw InputError("generation produced no frames");
    out.graph.finalize();
    return out;
}

} // namespace mlct
