#pragma once
// Immutable expression trees over (x, xi, y, eps, t) with exact symbolic
// differentiation, constant folding, substitution, and s-expression I/O.

#include <map>
#include <memory>
#include <optional>

#include "mlg/common.hpp"

namespace mlg {

enum class Var : uint8_t { X0, X1, Xi0, Xi1, Y0, Y1, Eps, T };

enum class NodeKind : uint8_t {
    Const, Variable, Add, Sub, Mul, Div, Pow, Exp, Log, Sin, Cos,
    JBracket,   // sqrt(1 + sum_i kid_i^2), variadic
    Smoothstep, // s(t) = g(t)/(g(t)+g(1-t)), g(t)=exp(-1/t) for t>0 else 0
    BumpExp     // exp(-1/u)/u^k for u>0 else 0; k = expo
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    NodeKind kind;
    double cval = 0.0;             // Const value
    Var var = Var::X0;             // Variable id
    double expo = 0.0;             // Pow exponent / BumpExp k
    std::vector<ExprPtr> kids;
};

struct EvalPoint {
    double x[2] = {0, 0};
    double xi[2] = {0, 0};
    double y[2] = {0, 0};
    double eps = 1.0;
    double t = 0.0;
};

inline ExprPtr make_node(NodeKind k, std::vector<ExprPtr> kids, double cval = 0.0,
                         Var v = Var::X0, double expo = 0.0) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->cval = cval;
    e->var = v;
    e->expo = expo;
    e->kids = std::move(kids);
    return e;
}

inline ExprPtr econst(double v) { return make_node(NodeKind::Const, {}, v); }
inline ExprPtr evar(Var v) { return make_node(NodeKind::Variable, {}, 0.0, v); }

inline bool is_const(const ExprPtr& e, double v) {
    return e->kind == NodeKind::Const && e->cval == v;
}
inline bool is_const(const ExprPtr& e) { return e->kind == NodeKind::Const; }

// Smart constructors with constant folding and unit/zero identities.
inline ExprPtr eadd(ExprPtr a, ExprPtr b) {
    if (is_const(a) && is_const(b)) return econst(a->cval + b->cval);
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    return make_node(NodeKind::Add, {std::move(a), std::move(b)});
}
inline ExprPtr esub(ExprPtr a, ExprPtr b) {
    if (is_const(a) && is_const(b)) return econst(a->cval - b->cval);
    if (is_const(b, 0)) return a;
    return make_node(NodeKind::Sub, {std::move(a), std::move(b)});
}
inline ExprPtr emul(ExprPtr a, ExprPtr b) {
    if (is_const(a) && is_const(b)) return econst(a->cval * b->cval);
    if (is_const(a, 0) || is_const(b, 0)) return econst(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    return make_node(NodeKind::Mul, {std::move(a), std::move(b)});
}
inline ExprPtr ediv(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0)) return econst(0);
    if (is_const(b, 1)) return a;
    if (is_const(a) && is_const(b) && b->cval != 0) return econst(a->cval / b->cval);
    return make_node(NodeKind::Div, {std::move(a), std::move(b)});
}
inline ExprPtr epow(ExprPtr a, double p) {
    if (p == 0.0) return econst(1);
    if (p == 1.0) return a;
    if (is_const(a) && (a->cval > 0 || p == std::floor(p)))
        return econst(std::pow(a->cval, p));
    return make_node(NodeKind::Pow, {std::move(a)}, 0.0, Var::X0, p);
}
inline ExprPtr eneg(ExprPtr a) { return emul(econst(-1), std::move(a)); }
inline ExprPtr eexp(ExprPtr a) {
    if (is_const(a)) return econst(std::exp(a->cval));
    return make_node(NodeKind::Exp, {std::move(a)});
}
inline ExprPtr elog(ExprPtr a) {
    if (is_const(a) && a->cval > 0) return econst(std::log(a->cval));
    return make_node(NodeKind::Log, {std::move(a)});
}
inline ExprPtr esin(ExprPtr a) {
    if (is_const(a)) return econst(std::sin(a->cval));
    return make_node(NodeKind::Sin, {std::move(a)});
}
inline ExprPtr ecos(ExprPtr a) {
    if (is_const(a)) return econst(std::cos(a->cval));
    return make_node(NodeKind::Cos, {std::move(a)});
}
inline ExprPtr ejbracket(std::vector<ExprPtr> args) {
    bool allc = true;
    for (auto& a : args) allc = allc && is_const(a);
    if (allc) {
        double s = 1.0;
        for (auto& a : args) s += a->cval * a->cval;
        return econst(std::sqrt(s));
    }
    return make_node(NodeKind::JBracket, std::move(args));
}
inline ExprPtr esmoothstep(ExprPtr a);
inline ExprPtr ebumpexp(double k, ExprPtr a);

inline double eval_smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double g = std::exp(-1.0 / t);
    double h = std::exp(-1.0 / (1.0 - t));
    return g / (g + h);
}
inline double eval_bumpexp(double k, double u) {
    if (u <= 0.0) return 0.0;
    return std::exp(-1.0 / u - k * std::log(u));
}

inline ExprPtr esmoothstep(ExprPtr a) {
    if (is_const(a)) return econst(eval_smoothstep(a->cval));
    return make_node(NodeKind::Smoothstep, {std::move(a)});
}
inline ExprPtr ebumpexp(double k, ExprPtr a) {
    if (is_const(a)) return econst(eval_bumpexp(k, a->cval));
    return make_node(NodeKind::BumpExp, {std::move(a)}, 0.0, Var::X0, k);
}

inline double eval(const ExprPtr& e, const EvalPoint& p) {
    switch (e->kind) {
        case NodeKind::Const: return e->cval;
        case NodeKind::Variable:
            switch (e->var) {
                case Var::X0: return p.x[0];
                case Var::X1: return p.x[1];
                case Var::Xi0: return p.xi[0];
                case Var::Xi1: return p.xi[1];
                case Var::Y0: return p.y[0];
                case Var::Y1: return p.y[1];
                case Var::Eps: return p.eps;
                case Var::T: return p.t;
            }
            return 0;
        case NodeKind::Add: return eval(e->kids[0], p) + eval(e->kids[1], p);
        case NodeKind::Sub: return eval(e->kids[0], p) - eval(e->kids[1], p);
        case NodeKind::Mul: return eval(e->kids[0], p) * eval(e->kids[1], p);
        case NodeKind::Div: {
            double den = eval(e->kids[1], p);
            if (den == 0.0) throw DomainError("division by zero");
            return eval(e->kids[0], p) / den;
        }
        case NodeKind::Pow: {
            double b = eval(e->kids[0], p);
            if (b < 0 && e->expo != std::floor(e->expo))
                throw DomainError("fractional power of negative base");
            return std::pow(b, e->expo);
        }
        case NodeKind::Exp: return std::exp(eval(e->kids[0], p));
        case NodeKind::Log: {
            double v = eval(e->kids[0], p);
            if (v <= 0.0) throw DomainError("log of non-positive value");
            return std::log(v);
        }
        case NodeKind::Sin: return std::sin(eval(e->kids[0], p));
        case NodeKind::Cos: return std::cos(eval(e->kids[0], p));
        case NodeKind::JBracket: {
            double s = 1.0;
            for (auto& k : e->kids) {
                double v = eval(k, p);
                s += v * v;
            }
            return std::sqrt(s);
        }
        case NodeKind::Smoothstep: return eval_smoothstep(eval(e->kids[0], p));
        case NodeKind::BumpExp: return eval_bumpexp(e->expo, eval(e->kids[0], p));
    }
    return 0;
}

inline ExprPtr diff(const ExprPtr& e, Var v) {
    switch (e->kind) {
        case NodeKind::Const: return econst(0);
        case NodeKind::Variable: return econst(e->var == v ? 1 : 0);
        case NodeKind::Add: return eadd(diff(e->kids[0], v), diff(e->kids[1], v));
        case NodeKind::Sub: return esub(diff(e->kids[0], v), diff(e->kids[1], v));
        case NodeKind::Mul:
            return eadd(emul(diff(e->kids[0], v), e->kids[1]),
                        emul(e->kids[0], diff(e->kids[1], v)));
        case NodeKind::Div:
            return esub(ediv(diff(e->kids[0], v), e->kids[1]),
                        ediv(emul(e->kids[0], diff(e->kids[1], v)),
                             emul(e->kids[1], e->kids[1])));
        case NodeKind::Pow:
            return emul(emul(econst(e->expo), epow(e->kids[0], e->expo - 1)),
                        diff(e->kids[0], v));
        case NodeKind::Exp: return emul(eexp(e->kids[0]), diff(e->kids[0], v));
        case NodeKind::Log: return ediv(diff(e->kids[0], v), e->kids[0]);
        case NodeKind::Sin: return emul(ecos(e->kids[0]), diff(e->kids[0], v));
        case NodeKind::Cos: return eneg(emul(esin(e->kids[0]), diff(e->kids[0], v)));
        case NodeKind::JBracket: {
            ExprPtr num = econst(0);
            for (auto& k : e->kids) num = eadd(num, emul(k, diff(k, v)));
            return ediv(num, make_node(NodeKind::JBracket, e->kids));
        }
        case NodeKind::Smoothstep: {
            // s'(u) = (g'(u)g(1-u) + g(u)g'(1-u)) / (g(u)+g(1-u))^2 with
            // g = BumpExp(0,.), g' = BumpExp(2,.); vanishes identically off (0,1).
            const ExprPtr& u = e->kids[0];
            ExprPtr om = esub(econst(1), u);
            ExprPtr g = ebumpexp(0, u), h = ebumpexp(0, om);
            ExprPtr g2 = ebumpexp(2, u), h2 = ebumpexp(2, om);
            ExprPtr den = eadd(g, h);
            ExprPtr sp = ediv(eadd(emul(g2, h), emul(g, h2)), emul(den, den));
            return emul(sp, diff(u, v));
        }
        case NodeKind::BumpExp: {
            const ExprPtr& u = e->kids[0];
            double k = e->expo;
            ExprPtr d = esub(ebumpexp(k + 2, u), emul(econst(k), ebumpexp(k + 1, u)));
            return emul(d, diff(u, v));
        }
    }
    return econst(0);
}

inline ExprPtr subst(const ExprPtr& e, const std::map<Var, ExprPtr>& m) {
    if (e->kind == NodeKind::Variable) {
        auto it = m.find(e->var);
        return it == m.end() ? e : it->second;
    }
    if (e->kids.empty()) return e;
    std::vector<ExprPtr> kids;
    kids.reserve(e->kids.size());
    bool changed = false;
    for (auto& k : e->kids) {
        kids.push_back(subst(k, m));
        changed = changed || kids.back() != k;
    }
    if (!changed) return e;
    switch (e->kind) {
        case NodeKind::Add: return eadd(kids[0], kids[1]);
        case NodeKind::Sub: return esub(kids[0], kids[1]);
        case NodeKind::Mul: return emul(kids[0], kids[1]);
        case NodeKind::Div: return ediv(kids[0], kids[1]);
        case NodeKind::Pow: return epow(kids[0], e->expo);
        case NodeKind::Exp: return eexp(kids[0]);
        case NodeKind::Log: return elog(kids[0]);
        case NodeKind::Sin: return esin(kids[0]);
        case NodeKind::Cos: return ecos(kids[0]);
        case NodeKind::JBracket: return ejbracket(std::move(kids));
        case NodeKind::Smoothstep: return esmoothstep(kids[0]);
        case NodeKind::BumpExp: return ebumpexp(e->expo, kids[0]);
        default: return e;
    }
}

inline void collect_vars(const ExprPtr& e, std::vector<bool>& seen) {
    if (e->kind == NodeKind::Variable) seen[static_cast<size_t>(e->var)] = true;
    for (auto& k : e->kids) collect_vars(k, seen);
}
inline bool depends_on(const ExprPtr& e, Var v) {
    std::vector<bool> seen(8, false);
    collect_vars(e, seen);
    return seen[static_cast<size_t>(v)];
}
inline bool depends_on_any(const ExprPtr& e, std::initializer_list<Var> vs) {
    std::vector<bool> seen(8, false);
    collect_vars(e, seen);
    for (Var v : vs)
        if (seen[static_cast<size_t>(v)]) return true;
    return false;
}
inline bool is_zero_expr(const ExprPtr& e) { return is_const(e, 0); }

// Complex-valued expression as a pair of real trees.
struct ComplexExpr {
    ExprPtr re = econst(0);
    ExprPtr im = econst(0);

    static ComplexExpr constant(cplx v) { return {econst(v.real()), econst(v.imag())}; }
    static ComplexExpr real(ExprPtr e) { return {std::move(e), econst(0)}; }

    cplx operator()(const EvalPoint& p) const { return {eval(re, p), eval(im, p)}; }
    bool is_zero() const { return is_zero_expr(re) && is_zero_expr(im); }
};

inline ComplexExpr operator+(const ComplexExpr& a, const ComplexExpr& b) {
    return {eadd(a.re, b.re), eadd(a.im, b.im)};
}
inline ComplexExpr operator-(const ComplexExpr& a, const ComplexExpr& b) {
    return {esub(a.re, b.re), esub(a.im, b.im)};
}
inline ComplexExpr operator*(const ComplexExpr& a, const ComplexExpr& b) {
    return {esub(emul(a.re, b.re), emul(a.im, b.im)),
            eadd(emul(a.re, b.im), emul(a.im, b.re))};
}
inline ComplexExpr operator*(double s, const ComplexExpr& a) {
    return {emul(econst(s), a.re), emul(econst(s), a.im)};
}
inline ComplexExpr operator/(const ComplexExpr& a, const ComplexExpr& b) {
    ExprPtr den = eadd(emul(b.re, b.re), emul(b.im, b.im));
    ComplexExpr num = a * ComplexExpr{b.re, eneg(b.im)};
    return {ediv(num.re, den), ediv(num.im, den)};
}
inline ComplexExpr conj(const ComplexExpr& a) { return {a.re, eneg(a.im)}; }
inline ComplexExpr cdiff(const ComplexExpr& a, Var v) {
    return {diff(a.re, v), diff(a.im, v)};
}
// D_v = -i d/dv
inline ComplexExpr cD(const ComplexExpr& a, Var v) {
    return {diff(a.im, v), eneg(diff(a.re, v))};
}
inline ComplexExpr csubst(const ComplexExpr& a, const std::map<Var, ExprPtr>& m) {
    return {subst(a.re, m), subst(a.im, m)};
}
inline bool cdepends_on_any(const ComplexExpr& a, std::initializer_list<Var> vs) {
    return depends_on_any(a.re, vs) || depends_on_any(a.im, vs);
}

// S-expression serialization: (add (var xi 0) (mul (const 0 1) (var xi 1))).
std::string to_sexpr(const ComplexExpr& e);
ComplexExpr parse_sexpr(const std::string& s);

}  // namespace mlg
