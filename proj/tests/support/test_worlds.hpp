#pragma once

// World builders shared by the unit, scenario and acceptance suites.

#include <string>
#include <vector>

#include "teamsim/random.hpp"
#include "teamsim/sim/world.hpp"

namespace teamsim::testing {

/// Closed rectangular room of `w` x `h` cells (walls included).
inline sim::WorldMap room(int w, int h, double resolution, Point2 origin = {}) {
    GridGeometry g{w, h, resolution, origin};
    std::vector<sim::Terrain> cells(g.size(), sim::Terrain::Open);
    for (int iy = 0; iy < h; ++iy)
        for (int ix = 0; ix < w; ++ix)
            if (ix == 0 || iy == 0 || ix == w - 1 || iy == h - 1) cells[g.index(ix, iy)] = sim::Terrain::Wall;
    return sim::WorldMap(g, std::move(cells));
}

/// Closed world with interior walls placed independently with probability `density`.
inline sim::WorldMap random_world(int w, int h, double resolution, double density, std::uint64_t seed,
                                  Point2 origin = {}) {
    RandomStream rng(seed);
    GridGeometry g{w, h, resolution, origin};
    std::vector<sim::Terrain> cells(g.size(), sim::Terrain::Open);
    for (int iy = 0; iy < h; ++iy)
        for (int ix = 0; ix < w; ++ix) {
            const bool border = ix == 0 || iy == 0 || ix == w - 1 || iy == h - 1;
            if (border || rng.uniform() < density) cells[g.index(ix, iy)] = sim::Terrain::Wall;
        }
    return sim::WorldMap(g, std::move(cells));
}

/// Random-walk carved maze on a `w` x `h` grid (odd sizes give clean corridors).
inline std::vector<std::uint8_t> carved_maze(int w, int h, std::uint64_t seed, double extra_openings = 0.1) {
    RandomStream rng(seed);
    std::vector<std::uint8_t> blocked(static_cast<std::size_t>(w * h), 1);
    auto at = [&](int x, int y) -> std::uint8_t& { return blocked[static_cast<std::size_t>(y * w + x)]; };
    std::vector<std::pair<int, int>> stack{{1, 1}};
    at(1, 1) = 0;
    const int dx[4] = {2, -2, 0, 0};
    const int dy[4] = {0, 0, 2, -2};
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        std::vector<int> options;
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k], ny = y + dy[k];
            if (nx > 0 && ny > 0 && nx < w - 1 && ny < h - 1 && at(nx, ny)) options.push_back(k);
        }
        if (options.empty()) {
            stack.pop_back();
            continue;
        }
        const int k = options[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(options.size()) - 1))];
        at(x + dx[k] / 2, y + dy[k] / 2) = 0;
        at(x + dx[k], y + dy[k]) = 0;
        stack.push_back({x + dx[k], y + dy[k]});
    }
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x)
            if (at(x, y) && rng.uniform() < extra_openings) at(x, y) = 0;
    return blocked;
}

}  // namespace teamsim::testing
