#pragma once

// Independent reference implementations used to freeze expected values.
// None of these call into the code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "teamsim/geometry.hpp"
#include "teamsim/grid.hpp"
#include "teamsim/sim/world.hpp"

namespace teamsim::testing {

/// Dense ray march: first sample (step `step`) that lands in a wall cell.
inline double ray_march_range(const sim::WorldMap& world, Point2 o, double angle, double max_range,
                              double step = 1e-4) {
    const GridGeometry& g = world.geometry();
    const double c = std::cos(angle), s = std::sin(angle);
    for (double t = 0; t <= max_range; t += step) {
        const Point2 p{o.x + t * c, o.y + t * s};
        const int ix = static_cast<int>(std::floor((p.x - g.origin.x) / g.resolution));
        const int iy = static_cast<int>(std::floor((p.y - g.origin.y) / g.resolution));
        if (!g.in_bounds(ix, iy) || world.at({ix, iy}) == sim::Terrain::Wall) return t;
    }
    return max_range;
}

/// Path cost a + b*sqrt(2) with exact comparison on integers.
struct ExactCost {
    std::int64_t a{0};
    std::int64_t b{0};

    /// sign of (a1 - a2) + (b1 - b2) * sqrt 2
    static int compare(const ExactCost& x, const ExactCost& y) {
        const std::int64_t da = x.a - y.a;
        const std::int64_t db = x.b - y.b;
        if (da == 0 && db == 0) return 0;
        if (da >= 0 && db >= 0) return 1;
        if (da <= 0 && db <= 0) return -1;
        // opposite signs: compare |da| with |db| sqrt 2 via squares
        const std::int64_t lhs = da * da;
        const std::int64_t rhs = 2 * db * db;
        if (da > 0) return lhs > rhs ? 1 : -1;
        return rhs > lhs ? 1 : -1;
    }
    bool operator<(const ExactCost& o) const { return compare(*this, o) < 0; }
    bool operator==(const ExactCost& o) const { return a == o.a && b == o.b; }
};

/// Dijkstra on the 8-connected grid with the no-corner-cutting rule, exact costs.
inline std::optional<ExactCost> dijkstra_cost(const std::vector<std::uint8_t>& blocked, int w, int h, Cell s, Cell t) {
    auto free = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h && !blocked[static_cast<std::size_t>(y * w + x)];
    };
    if (!free(s.ix, s.iy) || !free(t.ix, t.iy)) return std::nullopt;
    std::vector<std::optional<ExactCost>> dist(static_cast<std::size_t>(w * h));
    std::vector<bool> done(static_cast<std::size_t>(w * h), false);
    dist[static_cast<std::size_t>(s.iy * w + s.ix)] = ExactCost{};
    for (;;) {
        int best = -1;
        for (int i = 0; i < w * h; ++i)
            if (!done[static_cast<std::size_t>(i)] && dist[static_cast<std::size_t>(i)] &&
                (best < 0 || *dist[static_cast<std::size_t>(i)] < *dist[static_cast<std::size_t>(best)]))
                best = i;
        if (best < 0) return std::nullopt;
        done[static_cast<std::size_t>(best)] = true;
        const int x = best % w, y = best / w;
        if (x == t.ix && y == t.iy) return dist[static_cast<std::size_t>(best)];
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if ((dx == 0 && dy == 0) || !free(x + dx, y + dy)) continue;
                const bool diag = dx != 0 && dy != 0;
                if (diag && (!free(x + dx, y) || !free(x, y + dy))) continue;
                ExactCost c = *dist[static_cast<std::size_t>(best)];
                if (diag) ++c.b;
                else ++c.a;
                auto& slot = dist[static_cast<std::size_t>((y + dy) * w + x + dx)];
                if (!slot || c < *slot) slot = c;
            }
    }
}

enum class OracleClass { Unknown, Free, Occupied };

/// Frontier clusters by definition: a FREE cell with an UNKNOWN neighbour,
/// grouped by recursive flood fill; clusters sorted by their smallest index.
inline std::vector<std::vector<std::size_t>> brute_force_frontiers(const std::vector<OracleClass>& cls, int w, int h,
                                                                   std::size_t min_size) {
    auto at = [&](int x, int y) { return cls[static_cast<std::size_t>(y * w + x)]; };
    std::vector<bool> frontier(cls.size(), false);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (at(x, y) != OracleClass::Free) continue;
            bool touches = false;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if ((dx || dy) && nx >= 0 && ny >= 0 && nx < w && ny < h && at(nx, ny) == OracleClass::Unknown)
                        touches = true;
                }
            frontier[static_cast<std::size_t>(y * w + x)] = touches;
        }
    std::vector<int> label(cls.size(), -1);
    std::vector<std::vector<std::size_t>> clusters;
    std::function<void(int, int, int)> fill = [&](int x, int y, int id) {
        if (x < 0 || y < 0 || x >= w || y >= h) return;
        const auto i = static_cast<std::size_t>(y * w + x);
        if (!frontier[i] || label[i] >= 0) return;
        label[i] = id;
        clusters[static_cast<std::size_t>(id)].push_back(i);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                if (dx || dy) fill(x + dx, y + dy, id);
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (frontier[static_cast<std::size_t>(y * w + x)] && label[static_cast<std::size_t>(y * w + x)] < 0) {
                clusters.emplace_back();
                fill(x, y, static_cast<int>(clusters.size()) - 1);
            }
    std::vector<std::vector<std::size_t>> out;
    for (auto& c : clusters) {
        std::sort(c.begin(), c.end());
        if (c.size() >= min_size) out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

/// True iff the open segment p->q passes through the interior of the unit
/// square [x, x+1] x [y, y+1] (Liang-Barsky clip with strict overlap).
inline bool segment_crosses_square_interior(Point2 p, Point2 q, int x, int y) {
    double t0 = 0.0, t1 = 1.0;
    const double d[2] = {q.x - p.x, q.y - p.y};
    const double lo[2] = {static_cast<double>(x) - p.x, static_cast<double>(y) - p.y};
    const double hi[2] = {static_cast<double>(x + 1) - p.x, static_cast<double>(y + 1) - p.y};
    for (int k = 0; k < 2; ++k) {
        if (d[k] == 0) {
            if (!(lo[k] < 0 && 0 < hi[k])) return false;  // strictly inside the slab
            continue;
        }
        double a = lo[k] / d[k], b = hi[k] / d[k];
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
    }
    return t0 < t1;
}

/// Unknown cells visible from cell (fx, fy) within `range_cells`, checked
/// against every occupied square with the exact segment/square test.
inline std::size_t visibility_oracle(const std::vector<OracleClass>& cls, int w, int h, int fx, int fy,
                                     double range_cells) {
    std::size_t count = 0;
    const Point2 from{fx + 0.5, fy + 0.5};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (cls[static_cast<std::size_t>(y * w + x)] != OracleClass::Unknown) continue;
            const Point2 to{x + 0.5, y + 0.5};
            if (distance(from, to) > range_cells) continue;
            bool blocked = false;
            for (int oy = 0; oy < h && !blocked; ++oy)
                for (int ox = 0; ox < w && !blocked; ++ox) {
                    if (cls[static_cast<std::size_t>(oy * w + ox)] != OracleClass::Occupied) continue;
                    if ((ox == fx && oy == fy) || (ox == x && oy == y)) continue;
                    blocked = segment_crosses_square_interior(from, to, ox, oy);
                }
            if (!blocked) ++count;
        }
    return count;
}

/// Point in convex polygon via the triangle fan from vertex 0 (closed).
inline bool in_convex_polygon_fan(const std::vector<Point2>& v, Point2 p) {
    auto orient = [](Point2 a, Point2 b, Point2 c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); };
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double d1 = orient(v[0], v[i], p);
        const double d2 = orient(v[i], v[i + 1], p);
        const double d3 = orient(v[i + 1], v[0], p);
        if (d1 >= 0 && d2 >= 0 && d3 >= 0) return true;
    }
    return false;
}

}  // namespace teamsim::testing
