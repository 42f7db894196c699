#include <doctest.h>

#include "mlg/calculus.hpp"

using namespace mlg;

namespace {

SymbolFamily mk(ComplexExpr e, double order, int dim) {
    SymbolFamily a;
    a.expr = std::move(e);
    a.order = order;
    a.dim = dim;
    return a;
}

cplx at(const ComplexExpr& e, double x, double xi) {
    EvalPoint p;
    p.x[0] = x;
    p.xi[0] = xi;
    return e(p);
}

}  // namespace

TEST_CASE("composition expansion of xi^2 with sin(x)") {
    auto a = mk(ComplexExpr::real(emul(evar(Var::Xi0), evar(Var::Xi0))), 2, 1);
    auto b = mk(ComplexExpr::real(esin(evar(Var::X0))), 0, 1);
    Expansion e = expand_compose(a, b, 3);
    REQUIRE(e.terms.size() == 3);
    // Exact conjugation oracle: e^{-ix xi} Op(xi^2)(sin(x) e^{ix xi}) =
    // xi^2 sin x - 2 i xi cos x + sin x.
    for (double x : {0.3, 1.1, 2.7})
        for (double xi : {2.0, 5.0, -3.0}) {
            CHECK(std::abs(at(e.terms[0].term.expr, x, xi) -
                           cplx(xi * xi * std::sin(x), 0)) < 1e-12);
            CHECK(std::abs(at(e.terms[1].term.expr, x, xi) -
                           cplx(0, -2 * xi * std::cos(x))) < 1e-12);
            CHECK(std::abs(at(e.terms[2].term.expr, x, xi) - cplx(std::sin(x), 0)) <
                  1e-12);
        }
    CHECK(e.terms[0].order == doctest::Approx(2.0));
    CHECK(e.terms[1].order == doctest::Approx(1.0));
    CHECK(e.terms[2].order == doctest::Approx(0.0));
}

TEST_CASE("adjoint and transpose of x*xi") {
    auto a = mk(ComplexExpr::real(emul(evar(Var::X0), evar(Var::Xi0))), 1, 1);
    Expansion adj = expand_adjoint(a, 3);
    Expansion tr = expand_transpose(a, 3);
    for (double x : {0.4, 2.1})
        for (double xi : {3.0, -2.0}) {
            CHECK(std::abs(at(adj.partial_sum(3), x, xi) - (cplx(x * xi, 0) - cplx(0, 1))) <
                  1e-12);
            CHECK(std::abs(at(tr.partial_sum(3), x, xi) - (cplx(-x * xi, 0) - cplx(0, 1))) <
                  1e-12);
        }
}

TEST_CASE("amplitude reduction evaluates y at x") {
    ComplexExpr b = ComplexExpr::real(emul(esin(evar(Var::Y0)), evar(Var::Xi0)));
    Expansion e = reduce_amplitude(b, 1, 1, 3);
    REQUIRE(e.terms.size() >= 2);
    for (double x : {0.5, 1.9})
        for (double xi : {4.0, -1.5}) {
            CHECK(std::abs(at(e.terms[0].term.expr, x, xi) - cplx(std::sin(x) * xi, 0)) <
                  1e-12);
            CHECK(std::abs(at(e.terms[1].term.expr, x, xi) - cplx(0, -std::cos(x))) <
                  1e-12);
        }
}

TEST_CASE("parametrix of 1 + xi^2 inverts above the excision") {
    auto a = mk(ComplexExpr::real(
                    eadd(econst(1), emul(evar(Var::Xi0), evar(Var::Xi0)))),
                2, 1);
    ConeGrid cones;
    cones.n = 1;
    cones.min_radius = 8;
    std::vector<SamplingBox> boxes(1);
    boxes[0].center[0] = kPi;
    boxes[0].half_widths[0] = kPi;
    EpsilonGrid grid(1, 6);
    ParametrixResult p = parametrix(a, 3, boxes, cones, grid);
    double R = p.excision_radius;
    for (double xi : {2 * R + 1, 4 * R + 3, 50.0}) {
        cplx v = at(p.truncated_symbol.expr, 1.0, xi);
        CHECK(std::abs(v - cplx(1.0 / (1.0 + xi * xi), 0)) < 1e-12);
    }
}

TEST_CASE("parametrix refuses non-elliptic symbols") {
    auto a = mk(ComplexExpr::real(esin(evar(Var::X0))), 0, 1);  // vanishes at 0, pi
    ConeGrid cones;
    cones.n = 1;
    cones.min_radius = 8;
    std::vector<SamplingBox> boxes(1);
    boxes[0].center[0] = kPi;
    boxes[0].half_widths[0] = kPi;
    EpsilonGrid grid(1, 6);
    CHECK_THROWS_AS(parametrix(a, 2, boxes, cones, grid), NotElliptic);
}
