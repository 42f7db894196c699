#include <doctest.h>

#include <random>

#include "mlg/expr.hpp"

using namespace mlg;

namespace {

double fd_diff(const ExprPtr& e, EvalPoint p, Var v, double h = 1e-5) {
    EvalPoint a = p, b = p;
    double* fa = nullptr;
    double* fb = nullptr;
    switch (v) {
        case Var::X0: fa = &a.x[0]; fb = &b.x[0]; break;
        case Var::Xi0: fa = &a.xi[0]; fb = &b.xi[0]; break;
        default: REQUIRE(false);
    }
    *fa += h;
    *fb -= h;
    return (eval(e, a) - eval(e, b)) / (2 * h);
}

}  // namespace

TEST_CASE("symbolic derivative matches finite differences") {
    ExprPtr x = evar(Var::X0), xi = evar(Var::Xi0);
    std::vector<ExprPtr> exprs = {
        esin(emul(x, x)),
        ediv(econst(1), eadd(econst(1), emul(xi, xi))),
        ejbracket({xi}),
        eexp(eneg(emul(x, x))),
        emul(x, epow(xi, 3.0)),
    };
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.2, 2.5);
    for (auto& e : exprs)
        for (int t = 0; t < 10; ++t) {
            EvalPoint p;
            p.x[0] = dist(rng);
            p.xi[0] = dist(rng);
            for (Var v : {Var::X0, Var::Xi0}) {
                double sym = eval(diff(e, v), p);
                double num = fd_diff(e, p, v);
                CHECK(std::abs(sym - num) <= 1e-6 * (1 + std::abs(num)));
            }
        }
}

TEST_CASE("smoothstep endpoints and derivative") {
    CHECK(eval_smoothstep(-0.5) == 0.0);
    CHECK(eval_smoothstep(1.5) == 1.0);
    CHECK(std::abs(eval_smoothstep(0.5) - 0.5) < 1e-15);
    ExprPtr e = esmoothstep(evar(Var::X0));
    EvalPoint p;
    p.x[0] = 0.37;
    CHECK(std::abs(eval(diff(e, Var::X0), p) - fd_diff(e, p, Var::X0)) < 1e-6);
    p.x[0] = -0.2;
    CHECK(eval(diff(e, Var::X0), p) == 0.0);
}

TEST_CASE("s-expression round trip") {
    ComplexExpr a = ComplexExpr::real(emul(ejbracket({evar(Var::Xi0)}), esin(evar(Var::X0)))) +
                    ComplexExpr{econst(0), emul(evar(Var::X0), evar(Var::Xi0))};
    std::string s = to_sexpr(a);
    ComplexExpr b = parse_sexpr(s);
    CHECK(to_sexpr(b) == s);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int t = 0; t < 20; ++t) {
        EvalPoint p;
        p.x[0] = dist(rng);
        p.xi[0] = dist(rng);
        cplx va = a(p), vb = b(p);
        CHECK(std::abs(va - vb) <= 1e-14 * (1 + std::abs(va)));
    }
}

TEST_CASE("domain errors surface") {
    ExprPtr bad = ediv(econst(1), evar(Var::X0));
    EvalPoint p;
    p.x[0] = 0.0;
    CHECK_THROWS_AS(eval(bad, p), DomainError);
    CHECK_THROWS_AS(eval(elog(evar(Var::X0)), p), DomainError);
}
