#include <doctest.h>

#include "mlg/symbols.hpp"

using namespace mlg;

namespace {

SymbolFamily mk(ComplexExpr e, double order, int dim) {
    SymbolFamily a;
    a.expr = std::move(e);
    a.order = order;
    a.dim = dim;
    return a;
}

SamplingBox torus_box(int dim) {
    SamplingBox b;
    for (int i = 0; i < dim; ++i) {
        b.center[i] = kPi;
        b.half_widths[i] = kPi;
    }
    return b;
}

}  // namespace

TEST_CASE("order estimation brackets the true order") {
    EpsilonGrid grid(1, 6);
    auto jb = mk(ComplexExpr::real(ejbracket({evar(Var::Xi0)})), 1, 1);
    CHECK(std::abs(estimate_order(jb, torus_box(1), grid) - 1.0) <= 0.3);
    auto c = mk(ComplexExpr::real(esin(evar(Var::X0))), 0, 1);
    CHECK(std::abs(estimate_order(c, torus_box(1), grid)) <= 0.3);
    auto q = mk(ComplexExpr::real(emul(evar(Var::Xi0), evar(Var::Xi0))), 2, 1);
    CHECK(std::abs(estimate_order(q, torus_box(1), grid) - 2.0) <= 0.3);
}

TEST_CASE("derivatives reduce the estimated order in xi") {
    EpsilonGrid grid(1, 6);
    auto jb = mk(ComplexExpr::real(ejbracket({evar(Var::Xi0)})), 1, 1);
    auto d = diff_symbol(jb, {1}, {0});
    CHECK(d.order == doctest::Approx(0.0));
    CHECK(std::abs(estimate_order(d, torus_box(1), grid)) <= 0.35);
}

TEST_CASE("elliptic symbols report slow-scale ellipticity everywhere") {
    EpsilonGrid grid(1, 6);
    ConeGrid cones;
    cones.n = 1;
    cones.min_radius = 8;
    auto jb = mk(ComplexExpr::real(ejbracket({evar(Var::Xi0)})), 1, 1);
    auto rep = microellipticity_report(jb, {torus_box(1)}, cones, grid);
    CHECK(rep.all_slow_scale_elliptic());
    CHECK(characteristic_set(jb, {torus_box(1)}, cones, grid).empty());
}

TEST_CASE("xi1 in two dimensions is characteristic near e2") {
    EpsilonGrid grid(1, 6);
    ConeGrid cones;
    cones.n = 2;
    cones.D = 16;
    cones.min_radius = 8;
    auto a = mk(ComplexExpr::real(evar(Var::Xi0)), 1, 2);
    auto ch = characteristic_set(a, {torus_box(2)}, cones, grid);
    bool has_up = false, has_right = false;
    for (auto& [b, d] : ch) {
        if (d == 4) has_up = true;    // +e2
        if (d == 0) has_right = true; // +e1
    }
    CHECK(has_up);
    CHECK_FALSE(has_right);
}

TEST_CASE("cone cutoff is one inside and zero outside") {
    auto chi = build_cone_cutoff({0.0, 1.0}, kPi / 8, kPi / 4, 2);
    double x[2] = {1.0, 1.0};
    double up[2] = {0.0, 50.0};
    double side[2] = {50.0, 0.0};
    double mid[2] = {0.0, 0.2};  // below the radial ramp
    CHECK(std::abs(eval_symbol(chi, x, up, 1.0) - cplx(1, 0)) < 1e-12);
    CHECK(std::abs(eval_symbol(chi, x, side, 1.0)) < 1e-12);
    CHECK(std::abs(eval_symbol(chi, x, mid, 1.0)) < 1e-12);
    CHECK_THROWS_AS(build_cone_cutoff({0.0, 1.0}, kPi / 4, kPi / 8, 2), BadAngles);
}

TEST_CASE("microsupport marks rapidly decaying cones smoothing") {
    EpsilonGrid grid(1, 6);
    ConeGrid cones;
    cones.n = 2;
    cones.D = 16;
    cones.min_radius = 8;
    auto chi = build_cone_cutoff({0.0, 1.0}, kPi / 8, kPi / 4, 2);
    auto est = microsupport_estimate(chi, {torus_box(2)}, cones, grid, {-2, 0}, 1);
    bool side_smoothing = false, up_smoothing = true;
    for (auto& c : est.cells) {
        if (c.sector_id == 0) side_smoothing = c.smoothing;
        if (c.sector_id == 4) up_smoothing = c.smoothing;
    }
    CHECK(side_smoothing);
    CHECK_FALSE(up_smoothing);
}
