#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "support/oracles.hpp"
#include "support/test_worlds.hpp"
#include "teamsim/mapping/occupancy_grid.hpp"

using namespace teamsim;
using namespace teamsim::mapping;

namespace {

sim::Scan single_beam(Pose2D pose, double range, bool hit, double max_range = 100.0) {
    return sim::Scan{pose, kTwoPi, max_range, {{range, hit}}};
}

}  // namespace

TEST_CASE("classification thresholds") {
    CHECK(classify(0.0) == CellClass::Unknown);
    CHECK(classify(0.85) == CellClass::Occupied);   // p = 0.7006
    CHECK(classify(-0.4) == CellClass::Unknown);    // p = 0.401
    CHECK(classify(-0.8) == CellClass::Free);       // p = 0.310
    // Boundaries: log(0.65/0.35) = 0.6190
    CHECK(classify(0.618) == CellClass::Unknown);
    CHECK(classify(0.62) == CellClass::Occupied);
    CHECK(classify(-0.62) == CellClass::Free);
    RandomStream rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double lo = rng.uniform(-10, 10);
        const double p = 1 / (1 + std::exp(-lo));
        const CellClass expected = p > 0.65 ? CellClass::Occupied : (p < 0.35 ? CellClass::Free : CellClass::Unknown);
        CHECK(classify(lo) == expected);
    }
}

TEST_CASE("single hit beam: free run and occupied endpoint") {
    OccupancyGrid grid(GridGeometry{50, 10, 0.1, {}});
    const Pose2D pose = make_pose(0.05, 0.55, 0);
    const auto scan = single_beam(pose, 2.0, true);

    grid.integrate_scan(pose, scan);
    const std::size_t end = grid.geometry().index(20, 5);
    CHECK(grid.log_odds(end) == doctest::Approx(0.85));
    CHECK(grid.cls(end) == CellClass::Occupied);
    for (int ix = 0; ix < 20; ++ix) CHECK(grid.cls({ix, 5}) == CellClass::Unknown);  // -0.4 alone is not enough

    grid.integrate_scan(pose, scan);
    int free_cells = 0;
    for (int ix = 0; ix < 50; ++ix)
        if (grid.cls({ix, 5}) == CellClass::Free) ++free_cells;
    // Closed form: two -0.4 updates give p = 0.310 < 0.35; the endpoint sits at x = 2.05.
    CHECK(free_cells == 20);
    CHECK(grid.cls({21, 5}) == CellClass::Unknown);
}

TEST_CASE("no-hit beam never marks its endpoint occupied") {
    OccupancyGrid grid(GridGeometry{50, 10, 0.1, {}});
    const Pose2D pose = make_pose(0.05, 0.55, 0);
    for (int k = 0; k < 5; ++k) grid.integrate_scan(pose, single_beam(pose, 2.0, false, 2.0));
    CHECK(grid.log_odds(grid.geometry().index(20, 5)) == 0.0);
    CHECK(grid.cls({19, 5}) == CellClass::Free);
}

TEST_CASE("integration errors") {
    OccupancyGrid grid(GridGeometry{10, 10, 0.1, {}});
    CHECK_THROWS_AS(grid.integrate_scan(make_pose(-1, 0.5, 0), single_beam(make_pose(-1, 0.5, 0), 1, true)),
                    InvalidPose);
}

TEST_CASE("log-odds oracle on a 5x5 world: saturated scans produce empty diffs") {
    const auto world = testing::room(5, 5, 1.0);
    const Pose2D pose = make_pose(2.3, 2.6, 0.1);
    RandomStream rng(0);
    sim::LidarConfig cfg{8, kTwoPi, 100.0, 0.0};
    const auto scan = sim::scan(world, pose, cfg, rng);

    // Oracle: per-cell free/occupied increments per integration from a dense ray march.
    std::map<std::size_t, int> free_hits, occ_hits;
    const GridGeometry& g = world.geometry();
    for (std::size_t i = 0; i < scan.beams.size(); ++i) {
        const double a = scan.angle_of(i);
        std::vector<std::size_t> cells;
        auto sample = [&](double t) {
            const Cell c = g.cell_containing({pose.x + t * std::cos(a), pose.y + t * std::sin(a)});
            if (cells.empty() || cells.back() != g.index(c)) cells.push_back(g.index(c));
        };
        for (double t = 0; t < scan.beams[i].range; t += 1e-4) sample(t);
        sample(scan.beams[i].range + 1e-7);
        for (std::size_t k = 0; k + 1 < cells.size(); ++k) ++free_hits[cells[k]];
        ++occ_hits[cells.back()];
    }

    OccupancyGrid grid(g);
    std::vector<CellClass> previous(g.size(), CellClass::Unknown);
    for (int n = 1; n <= 30; ++n) {
        const MapDiff diff = grid.integrate_scan(pose, scan, static_cast<std::uint64_t>(n));
        std::vector<CellClass> expected(g.size(), CellClass::Unknown);
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            const double lo = std::clamp(n * (free_hits[idx] * -0.4 + occ_hits[idx] * 0.85), -10.0, 10.0);
            CHECK(grid.log_odds(idx) == doctest::Approx(lo).epsilon(1e-9));
            const double p = 1 / (1 + std::exp(-lo));
            expected[idx] = p > 0.65 ? CellClass::Occupied : (p < 0.35 ? CellClass::Free : CellClass::Unknown);
        }
        std::vector<CellChange> expected_changes;
        for (std::size_t idx = 0; idx < g.size(); ++idx)
            if (expected[idx] != previous[idx]) expected_changes.push_back({idx, expected[idx]});
        CHECK(diff.changed == expected_changes);
        previous = expected;
        if (n >= 25) CHECK(diff.empty());
    }
}

TEST_CASE("coverage") {
    OccupancyGrid grid(GridGeometry{10, 10, 1.0, {}});
    CHECK(coverage(grid) == 0.0);
    for (std::size_t i = 0; i < 37; ++i) grid.update_cell(i * 2, i % 2 ? 5.0 : -5.0);
    CHECK(coverage(grid) == doctest::Approx(0.37));
    for (std::size_t i = 0; i < 100; ++i) grid.update_cell(i, -20.0);
    CHECK(coverage(grid) == 1.0);
    CHECK(coverage(grid, KeepInRegion::circle({5, 5}, 2)) == 1.0);
    CHECK_THROWS_AS(coverage(grid, KeepInRegion::circle({50, 50}, 1)), EmptyRegion);
}

TEST_CASE("log-odds integration commutes per cell") {
    const auto world = testing::random_world(40, 40, 0.2, 0.08, 3);
    RandomStream rng(4);
    std::vector<std::pair<Pose2D, sim::Scan>> scans;
    for (int k = 0; k < 6; ++k) {
        Point2 p;
        do {
            p = {rng.uniform(0.5, 7.5), rng.uniform(0.5, 7.5)};
        } while (world.is_wall_at(p));
        const Pose2D pose = make_pose(p.x, p.y, rng.uniform(-kPi, kPi));
        scans.push_back({pose, sim::scan(world, pose, sim::LidarConfig{90}, rng)});
    }
    OccupancyGrid forward(world.geometry()), backward(world.geometry());
    for (const auto& [pose, s] : scans) forward.integrate_scan(pose, s);
    for (auto it = scans.rbegin(); it != scans.rend(); ++it) backward.integrate_scan(it->first, it->second);
    for (std::size_t i = 0; i < world.geometry().size(); ++i) {
        CHECK(forward.log_odds(i) == doctest::Approx(backward.log_odds(i)).epsilon(1e-9));
        CHECK(forward.cls(i) == backward.cls(i));
    }
}

TEST_CASE("zero-noise mapping agrees with ground truth and diffs replay exactly") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto world = testing::random_world(50, 50, 0.2, 0.06, seed);
        OccupancyGrid grid(world.geometry());
        std::vector<CellClass> replay(world.geometry().size(), CellClass::Unknown);
        RandomStream rng(seed);
        for (int k = 0; k < 40; ++k) {
            Point2 p;
            do {
                p = {rng.uniform(0.3, 9.7), rng.uniform(0.3, 9.7)};
            } while (world.is_wall_at(p));
            const Pose2D pose = make_pose(p.x, p.y, rng.uniform(-kPi, kPi));
            const auto s = sim::scan(world, pose, sim::LidarConfig{}, rng);
            for (int rep = 0; rep < 3; ++rep) apply_diff(replay, grid.integrate_scan(pose, s));
        }
        std::size_t known = 0;
        for (std::size_t i = 0; i < world.geometry().size(); ++i) {
            const bool wall = world.cells()[i] == sim::Terrain::Wall;
            if (grid.cls(i) == CellClass::Occupied) CHECK(wall);
            if (grid.cls(i) == CellClass::Free) CHECK_FALSE(wall);
            if (grid.cls(i) != CellClass::Unknown) ++known;
        }
        CHECK(known > world.geometry().size() / 2);
        CHECK(std::equal(replay.begin(), replay.end(), grid.classes().begin(), grid.classes().end()));
    }
}

TEST_CASE("run-length snapshot encoding") {
    RandomStream rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.integer(1, 400));
        std::vector<CellClass> cls(n);
        CellClass current = CellClass::Unknown;
        for (auto& c : cls) {
            if (rng.uniform() < 0.2) current = static_cast<CellClass>(rng.integer(0, 2));
            c = current;
        }
        CHECK(rle_decode(rle_encode(cls), n) == cls);
    }
    CHECK(rle_encode(std::vector<CellClass>{CellClass::Unknown, CellClass::Unknown, CellClass::Free}) == "U2F1");
    CHECK_THROWS(rle_decode("U2X1", 3));
    CHECK_THROWS(rle_decode("U2", 3));
    CHECK_THROWS(rle_decode("U4", 3));
}
