#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "support/oracles.hpp"
#include "teamsim/exploration/frontier.hpp"

using namespace teamsim;
using namespace teamsim::exploration;
using mapping::CellClass;
using mapping::OccupancyGrid;
using testing::OracleClass;

namespace {

void set_class(OccupancyGrid& grid, std::size_t idx, CellClass c) {
    grid.update_cell(idx, -grid.log_odds(idx));
    if (c == CellClass::Free) grid.update_cell(idx, -5.0);
    if (c == CellClass::Occupied) grid.update_cell(idx, 5.0);
}

OccupancyGrid grid_from(const std::vector<OracleClass>& cls, int w, int h, double res = 1.0) {
    OccupancyGrid grid(GridGeometry{w, h, res, {}});
    for (std::size_t i = 0; i < cls.size(); ++i)
        set_class(grid, i, cls[i] == OracleClass::Free ? CellClass::Free
                           : cls[i] == OracleClass::Occupied ? CellClass::Occupied : CellClass::Unknown);
    return grid;
}

std::vector<OracleClass> random_classes(RandomStream& rng, std::size_t n, double p_free = 0.4,
                                        double p_occ = 0.2) {
    std::vector<OracleClass> cls(n);
    for (auto& c : cls) {
        const double u = rng.uniform();
        c = u < p_free ? OracleClass::Free : (u < p_free + p_occ ? OracleClass::Occupied : OracleClass::Unknown);
    }
    return cls;
}

Frontier scored_frontier(std::size_t first, double utility, double effort) {
    Frontier f;
    f.cells = {first};
    f.utility = utility;
    f.effort = effort;
    f.scored = true;
    f.feasible = true;
    return f;
}

}  // namespace

TEST_CASE("trivially empty frontier sets") {
    OccupancyGrid unknown(GridGeometry{10, 10, 0.5, {}});
    CHECK(detect_frontiers(unknown).empty());
    OccupancyGrid known(GridGeometry{10, 10, 0.5, {}});
    for (std::size_t i = 0; i < 100; ++i) set_class(known, i, i % 7 ? CellClass::Free : CellClass::Occupied);
    CHECK(detect_frontiers(known).empty());
}

TEST_CASE("detection matches a brute-force flood-fill oracle on 1000 random 5x5 grids") {
    RandomStream rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto cls = random_classes(rng, 25, rng.uniform(0.2, 0.7), rng.uniform(0.0, 0.3));
        const auto grid = grid_from(cls, 5, 5);
        const std::size_t min_size = trial % 2 ? 3 : 1;
        const auto got = detect_frontiers(grid, min_size);
        const auto expected = testing::brute_force_frontiers(cls, 5, 5, min_size);
        REQUIRE(got.size() == expected.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
            CHECK(got[k].cells == expected[k]);
            for (std::size_t c : got[k].cells) CHECK(is_frontier_cell(grid, grid.geometry().cell_of(c)));
            // centroid sits on the center of a FREE cell
            const Cell cc = grid.geometry().cell_containing(got[k].centroid);
            CHECK(grid.cls(cc) == CellClass::Free);
            CHECK(distance(grid.geometry().cell_center(cc), got[k].centroid) < 1e-12);
        }
    }
}

TEST_CASE("keep-in filtering") {
    // Frontier along row 10 of a 0.1 m grid, cells 5..14 (centers x = 0.55 .. 1.45, y = 1.05)
    OccupancyGrid grid(GridGeometry{30, 30, 0.1, {}});
    for (int ix = 5; ix < 15; ++ix)
        for (int iy = 0; iy <= 10; ++iy) set_class(grid, grid.geometry().index(ix, iy), CellClass::Free);
    const auto frontiers = detect_frontiers(grid);
    REQUIRE_FALSE(frontiers.empty());

    CHECK(filter_keep_in(frontiers, KeepInRegion::circle({1.5, 1.5}, 10), grid.geometry()).size() ==
          frontiers.size());

    // circle whose radius reaches the farthest frontier cell center exactly, then falls short by epsilon
    const Point2 center{1.0, 0.5};
    double far = 0;
    for (const auto& f : frontiers)
        for (std::size_t c : f.cells) far = std::max(far, distance(center, grid.geometry().cell_center(c)));
    CHECK(filter_keep_in(frontiers, KeepInRegion::circle(center, far), grid.geometry()).size() == frontiers.size());
    CHECK(filter_keep_in(frontiers, KeepInRegion::circle(center, far - 1e-6), grid.geometry()).size() <
          frontiers.size());
}

TEST_CASE("convex polygon filtering matches a triangle-fan oracle") {
    RandomStream rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cls = random_classes(rng, 400, 0.5, 0.05);
        const auto grid = grid_from(cls, 20, 20, 0.25);
        const auto frontiers = detect_frontiers(grid, 1);
        // random convex polygon: sorted angles on an ellipse
        const int n = static_cast<int>(rng.integer(3, 8));
        std::vector<double> angles;
        for (int i = 0; i < n; ++i) angles.push_back(rng.uniform(0, kTwoPi));
        std::sort(angles.begin(), angles.end());
        const Point2 c{rng.uniform(1.5, 3.5), rng.uniform(1.5, 3.5)};
        const double rx = rng.uniform(1, 3), ry = rng.uniform(1, 3);
        std::vector<Point2> v;
        for (double a : angles) v.push_back({c.x + rx * std::cos(a), c.y + ry * std::sin(a)});
        KeepInRegion region = KeepInRegion::circle({0, 0}, 1);
        try {
            region = KeepInRegion::polygon(v);
        } catch (const InvalidRegion&) {
            continue;  // degenerate draw
        }
        const auto kept = filter_keep_in(frontiers, region, grid.geometry());
        std::size_t k = 0;
        for (const auto& f : frontiers) {
            bool inside = true;
            for (std::size_t cell : f.cells)
                inside = inside && testing::in_convex_polygon_fan(v, grid.geometry().cell_center(cell));
            if (inside) {
                REQUIRE(k < kept.size());
                CHECK(kept[k++].cells == f.cells);
            }
        }
        CHECK(k == kept.size());
    }
}

TEST_CASE("information gain equals an exhaustive visibility oracle on 8x8 grids") {
    RandomStream rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const auto cls = random_classes(rng, 64, 0.3, 0.25);
        const auto grid = grid_from(cls, 8, 8);
        const int fx = static_cast<int>(rng.integer(0, 7)), fy = static_cast<int>(rng.integer(0, 7));
        const double range = rng.uniform(2.0, 9.0);
        CHECK(visible_unknown_cells(grid, {fx, fy}, range) == testing::visibility_oracle(cls, 8, 8, fx, fy, range));
    }
}

TEST_CASE("scoring: effort, zero gain and feasibility") {
    // Open 10 x 4 m corridor known free, with an unknown strip beyond x = 8.
    const GridGeometry g{100, 40, 0.1, {}};
    OccupancyGrid grid(g);
    for (int iy = 0; iy < 40; ++iy)
        for (int ix = 0; ix < 100; ++ix) {
            const bool wall = iy == 0 || iy == 39 || ix == 0;
            if (wall) set_class(grid, g.index(ix, iy), CellClass::Occupied);
            else if (ix < 80) set_class(grid, g.index(ix, iy), CellClass::Free);
        }
    const planning::InflatedCostmap costmap(grid);
    const auto frontiers = detect_frontiers(grid);
    REQUIRE(frontiers.size() == 1);

    const Pose2D near_pose = make_pose(5.0, 2.0, 0), far_pose = make_pose(2.0, 2.0, 0);
    const Frontier near = score(frontiers[0], grid, costmap, near_pose);
    const Frontier far = score(frontiers[0], grid, costmap, far_pose);
    REQUIRE(near.feasible);
    REQUIRE(far.feasible);
    CHECK(near.info_gain == far.info_gain);
    CHECK(near.info_gain > 0);
    CHECK(near.effort < far.effort);
    CHECK(near.utility > far.utility);
    CHECK(near.utility == doctest::Approx(near.info_gain - near.effort));
    CHECK(near.path->length == near.effort);

    // with no unknown cells in range the utility is pure effort cost
    ExplorationConfig tiny;
    tiny.gain_range = 0.0;
    tiny.beta = 2.0;
    const Frontier blind = score(frontiers[0], grid, costmap, near_pose, tiny);
    CHECK(blind.info_gain == 0.0);
    CHECK(blind.utility == doctest::Approx(-2.0 * blind.effort));

    // robot walled off from the frontier: infeasible
    OccupancyGrid sealed = grid;
    for (int iy = 0; iy < 40; ++iy) set_class(sealed, g.index(30, iy), CellClass::Occupied);
    const planning::InflatedCostmap sealed_costmap(sealed);
    const Frontier cut = score(frontiers[0], sealed, sealed_costmap, far_pose);
    CHECK_FALSE(cut.feasible);
    CHECK_FALSE(select_frontier(std::span(&cut, 1)).has_value());
}

TEST_CASE("selection: equal gain, nearer effort wins") {
    std::vector<Frontier> fs{scored_frontier(10, 5.0 - 5.0, 5.0), scored_frontier(20, 5.0 - 2.0, 2.0)};
    CHECK(select_frontier(fs) == 1u);
    CHECK_FALSE(select_frontier(std::span<const Frontier>{}).has_value());
}

TEST_CASE("selection equals an exhaustive argmax and is invariant to weight scaling") {
    RandomStream rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = static_cast<int>(rng.integer(1, 8));
        std::vector<double> gains, efforts;
        std::vector<Frontier> fs;
        for (int i = 0; i < n; ++i) {
            // values on a coarse lattice so ties are common
            const double gain = static_cast<double>(rng.integer(0, 4)) * 0.5;
            const double effort = static_cast<double>(rng.integer(1, 4)) * 0.5;
            Frontier f = scored_frontier(static_cast<std::size_t>(rng.integer(0, 50)), gain - effort, effort);
            f.feasible = rng.uniform() < 0.85;
            gains.push_back(gain);
            efforts.push_back(effort);
            fs.push_back(f);
        }
        std::optional<std::size_t> expected;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (!fs[i].feasible) continue;
            bool beats_all = true;
            for (std::size_t j = 0; j < fs.size(); ++j) {
                if (j == i || !fs[j].feasible) continue;
                const auto key_i = std::make_tuple(-fs[i].utility, fs[i].effort, fs[i].first_cell(), i);
                const auto key_j = std::make_tuple(-fs[j].utility, fs[j].effort, fs[j].first_cell(), j);
                if (key_j < key_i) beats_all = false;
            }
            if (beats_all) expected = i;
        }
        const auto got = select_frontier(fs);
        CHECK(got == expected);

        // power-of-two scaling keeps utilities exact
        for (double k : {0.25, 2.0, 8.0}) {
            std::vector<Frontier> scaled = fs;
            for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i].utility = k * gains[i] - k * efforts[i];
            CHECK(select_frontier(scaled) == got);
        }
    }
}

TEST_CASE("all frontiers outside the keep-in region leaves nothing to select") {
    const GridGeometry g{40, 40, 0.25, {}};
    OccupancyGrid grid(g);
    for (int iy = 0; iy < 20; ++iy)
        for (int ix = 0; ix < 40; ++ix) set_class(grid, g.index(ix, iy), CellClass::Free);
    const auto frontiers = detect_frontiers(grid);
    REQUIRE_FALSE(frontiers.empty());
    const KeepInRegion region = KeepInRegion::circle({5, 2}, 2.0);  // frontier row is at y = 4.875
    const auto kept = filter_keep_in(frontiers, region, g);
    CHECK(kept.empty());
    CHECK_FALSE(select_frontier(kept).has_value());
    CHECK(coverage(grid) < 1.0);
}
