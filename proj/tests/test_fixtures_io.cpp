#include <doctest.h>

#include <cstdio>

#include "mlg/fixtures.hpp"
#include "mlg/io.hpp"
#include "mlg/scenarios.hpp"

using namespace mlg;

TEST_CASE("fixture catalog is populated") {
    auto cat = fixture_catalog();
    CHECK(cat.size() >= 10);
    GridSpec s1(1, 64);
    GridSpec s2(2, 64);
    EpsilonGrid grid(1, 6);
    for (auto& f : cat) {
        auto u = make_fixture(f.name, f.dim == 1 ? s1 : s2, grid, 3);
        CHECK(u.data.size() == 6);
    }
    CHECK_THROWS_AS(make_fixture("nope", s1, grid), ValidationError);
}

TEST_CASE("delta integrates to one") {
    GridSpec spec(1, 256);
    EpsilonGrid grid(1, 8);
    auto u = make_fixture("delta", spec, grid);
    for (auto& slice : u.data) {
        cplx s = 0;
        for (auto& v : slice) s += v;
        CHECK(std::abs(s * spec.spacing() - cplx(1, 0)) < 1e-6);
    }
}

TEST_CASE("heaviside sheet is constant along the second axis") {
    GridSpec spec(2, 64);
    EpsilonGrid grid(1, 6);
    auto u = make_fixture("heaviside2d", spec, grid);
    for (auto& slice : u.data)
        for (int i = 0; i < spec.G; ++i)
            for (int j = 1; j < spec.G; ++j)
                CHECK(slice[i * spec.G + j] == slice[i * spec.G]);
}

TEST_CASE("MLGF files round trip") {
    GridSpec spec(1, 64);
    EpsilonGrid grid(1, 6);
    auto u = make_fixture("delta", spec, grid);
    std::string path = "mlgf_roundtrip_test.bin";
    write_mlgf(path, u);
    auto v = read_mlgf(path);
    CHECK(v.spec.n == 1);
    CHECK(v.spec.G == 64);
    CHECK(v.eps_grid.count() == 6);
    CHECK(v.data == u.data);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_mlgf("does_not_exist.mlgf"), ValidationError);
}

TEST_CASE("report serialization is deterministic") {
    GridSpec spec(1, 128);
    EpsilonGrid grid(1, 8);
    CellDecomposition cells(spec, 8);
    ConeGrid cones;
    cones.n = 1;
    cones.min_radius = 16;
    auto u = make_fixture("delta", spec, grid);
    auto wf1 = wavefront_estimate(u, cells, cones);
    auto wf2 = wavefront_estimate(u, cells, cones);
    CHECK(wavefront_csv(wf1, cells, cones) == wavefront_csv(wf2, cells, cones));
    CHECK(wavefront_json(wf1).dump() == wavefront_json(wf2).dump());
}

TEST_CASE("symbol catalog labels resolve") {
    for (auto& label : symbol_catalog_labels()) {
        auto a = catalog_symbol(label);
        CHECK(a.dim >= 1);
        // serialization survives a round trip
        CHECK(to_sexpr(parse_sexpr(to_sexpr(a.expr))) == to_sexpr(a.expr));
    }
    CHECK_THROWS_AS(catalog_symbol("bogus"), ValidationError);
}
