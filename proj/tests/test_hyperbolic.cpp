#include <doctest.h>

#include <random>

#include "mlg/fixtures.hpp"
#include "mlg/hyperbolic.hpp"

using namespace mlg;

namespace {

SymbolFamily mk(ComplexExpr e, double order, int dim) {
    SymbolFamily a;
    a.expr = std::move(e);
    a.order = order;
    a.dim = dim;
    return a;
}

HamiltonianField variable_field() {
    return {mk(ComplexExpr::real(emul(
                   eadd(econst(1), emul(econst(0.5), esin(evar(Var::X0)))),
                   evar(Var::Xi0))),
               1, 1),
            1};
}

double p1_at(const HamiltonianField& f, const FlowState& s) {
    return eval_symbol(f.P1, s.x, s.xi, 1.0, s.t).real();
}

}  // namespace

TEST_CASE("flow conserves an autonomous Hamiltonian") {
    auto f = variable_field();
    f.validate();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xd(0.0, kTwoPi), kd(0.5, 4.0);
    for (int t = 0; t < 20; ++t) {
        FlowState s;
        s.x[0] = xd(rng);
        s.xi[0] = kd(rng) * (t % 2 ? 1 : -1);
        double h0 = p1_at(f, s);
        FlowState s1 = hamilton_flow(f, s, 0.7, 1e-3);
        CHECK(std::abs(p1_at(f, s1) - h0) <= 1e-7 * std::abs(h0));
        // group law
        FlowState sa = hamilton_flow(f, s, 0.3, 1e-3);
        FlowState sb = hamilton_flow(f, sa, 0.4, 1e-3);
        CHECK(std::abs(sb.x[0] - s1.x[0]) <= 1e-7);
        CHECK(std::abs(sb.xi[0] - s1.xi[0]) <= 1e-7);
        // degree-1 homogeneity: directions flow independently of |xi|
        FlowState s2 = s;
        s2.xi[0] *= 2;
        FlowState s2t = hamilton_flow(f, s2, 0.7, 1e-3);
        CHECK(std::abs(s2t.x[0] - s1.x[0]) <= 1e-7);
        CHECK(std::abs(s2t.xi[0] - 2 * s1.xi[0]) <= 1e-7);
    }
}

TEST_CASE("linear chart flow matches the closed form") {
    HamiltonianField f{mk(ComplexExpr::real(emul(evar(Var::X0), evar(Var::Xi0))), 1, 1), 1};
    FlowState s;
    s.x[0] = 1.0;
    s.xi[0] = 1.5;
    FlowState r = hamilton_flow(f, s, 1.0, 1e-3);
    CHECK(std::abs(r.x[0] - std::exp(1.0)) <= 1e-8);
    CHECK(std::abs(r.xi[0] - 1.5 * std::exp(-1.0)) <= 1e-8);
}

TEST_CASE("lift keeps tau on the characteristic") {
    auto f = variable_field();
    double x0[2] = {1.2, 0}, xi0[2] = {1.0, 0};
    auto lift = bicharacteristic_lift(f, x0, xi0, 0.0, 2.0, 1e-3);
    REQUIRE(!lift.empty());
    for (auto& q : lift) {
        double xv[2] = {q.x[0], 0}, kv[2] = {q.xi[0], 0};
        double p = eval_symbol(f.P1, xv, kv, 1.0, q.t).real();
        CHECK(std::abs(q.tau + p) <= 1e-8);
    }
    // constant speed: tau stays at -c xi0
    HamiltonianField fc{mk(ComplexExpr::real(emul(econst(2.0), evar(Var::Xi0))), 1, 1), 1};
    auto liftc = bicharacteristic_lift(fc, x0, xi0, 0.0, 1.0, 1e-3);
    for (auto& q : liftc) CHECK(std::abs(q.tau + 2.0) <= 1e-10);
}

TEST_CASE("constant-coefficient evolution is the exact translation") {
    GridSpec spec(1, 128);
    EpsilonGrid grid(1, 6);
    auto g = make_fixture("plane_wave", spec, grid);  // e^{i 8 x}
    HamiltonianField f{mk(ComplexExpr::real(evar(Var::Xi0)), 1, 1), 1};
    CauchyProblemSpec cp{f, std::nullopt, g, 0.25, 0.0, {0.25}};
    auto sols = solve_cauchy(cp);
    REQUIRE(sols.size() == 1);
    cplx phase = std::exp(cplx(0, -8 * 0.25));
    for (int ji = 0; ji < grid.count(); ++ji)
        for (int m = 0; m < spec.G; ++m)
            CHECK(std::abs(sols[0].data[ji][m] - phase * g.data[ji][m]) < 1e-10);
}

TEST_CASE("variable-coefficient stepping self-converges") {
    GridSpec spec(1, 128);
    EpsilonGrid grid(1, 6);
    auto g = make_fixture("sin", spec, grid);
    auto f = variable_field();
    double dt = cfl_bound(f, spec);
    CauchyProblemSpec c1{f, std::nullopt, g, 0.25, dt, {0.25}};
    CauchyProblemSpec c2{f, std::nullopt, g, 0.25, dt / 2, {0.25}};
    auto s1 = solve_cauchy(c1);
    auto s2 = solve_cauchy(c2);
    for (int ji = 0; ji < grid.count(); ++ji)
        for (int m = 0; m < spec.G; ++m)
            CHECK(std::abs(s1[0].data[ji][m] - s2[0].data[ji][m]) < 1e-6);
}

TEST_CASE("transported symbol table at t=0 is the direct sample") {
    GridSpec spec(1, 128);
    CellDecomposition cells(spec, 8);
    ConeGrid cones;
    cones.n = 1;
    cones.min_radius = 8;
    auto q = mk(ComplexExpr::real(esin(evar(Var::X0))), 0, 1);
    auto f = variable_field();
    std::vector<double> radii = {16.0, 32.0};
    auto table = transport_symbol(q, f, 0.0, cells, cones, radii, 1e-3);
    for (int c = 0; c < table.cells; ++c)
        for (int d = 0; d < table.sectors; ++d)
            for (int s = 0; s < table.shells; ++s) {
                double x = cells.cell_center(c);
                CHECK(std::abs(table.at(c, d, s) - cplx(std::sin(x), 0)) < 1e-8);
            }
}
