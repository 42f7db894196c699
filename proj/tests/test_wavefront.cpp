#include <doctest.h>

#include "mlg/fixtures.hpp"
#include "mlg/wavefront.hpp"

using namespace mlg;

TEST_CASE("smooth families have empty wave front") {
    GridSpec spec(1, 128);
    EpsilonGrid grid(1, 8);
    CellDecomposition cells(spec, 8);
    ConeGrid cones;
    cones.n = 1;
    cones.min_radius = spec.G / 8.0;
    for (const char* name : {"sin", "one", "plane_wave"}) {
        auto u = make_fixture(name, spec, grid);
        auto wf = wavefront_estimate(u, cells, cones);
        CHECK(wf.singular_set().empty());
    }
}

TEST_CASE("point mass is singular at its cell in both directions") {
    GridSpec spec(1, 256);
    EpsilonGrid grid(1, 8);
    CellDecomposition cells(spec, 8);
    ConeGrid cones;
    cones.n = 1;
    cones.min_radius = spec.G / 8.0;
    auto u = make_fixture("delta", spec, grid);
    auto wf = wavefront_estimate(u, cells, cones);
    int core = 2;  // x0 = pi/2 + 0.1
    for (int d : {0, 1}) {
        auto it = wf.verdicts.find({core, d});
        REQUIRE(it != wf.verdicts.end());
        CHECK_FALSE(it->second.regular);
        CHECK(it->second.slope > 0.6);
        CHECK(it->second.slope < 1.4);
    }
    for (auto& [key, v] : wf.verdicts)
        if (!v.regular) CHECK(std::abs(key.first - core) <= 1);
    auto ss = singsupp_estimate(u, cells, cones);
    CHECK(!ss.empty());
    for (int c : ss) CHECK(std::abs(c - core) <= 1);
}

TEST_CASE("cell-sector dilation wraps cells and 2D sectors") {
    auto d1 = dilate_cell_sector({{0, 1}}, 8, 1, 2);
    CHECK(subset_of({{7, 1}, {0, 1}, {1, 1}}, d1));
    CHECK_FALSE(subset_of({{0, 0}}, d1));  // 1D sectors do not dilate
    auto d2 = dilate_cell_sector({{0, 0}}, 8, 2, 16);
    CHECK(subset_of({{0, 15}, {0, 1}, {9, 0}, {63, 0}}, d2));
}

TEST_CASE("G-infinity verdicts distinguish the coefficient scale") {
    GridSpec spec(1, 256);
    EpsilonGrid grid(1, 8);
    auto smooth = make_fixture("sin", spec, grid);
    CHECK(ginf_verdict(smooth, 4).verdict);
    auto slow = make_fixture("slow_lorentz", spec, grid);
    CHECK(ginf_verdict(slow, 4).verdict);
}
