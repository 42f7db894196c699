#include "mlg/expr.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace mlg {
namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* var_name(Var v) {
    switch (v) {
        case Var::X0: case Var::X1: return "x";
        case Var::Xi0: case Var::Xi1: return "xi";
        case Var::Y0: case Var::Y1: return "y";
        case Var::Eps: return "eps";
        case Var::T: return "t";
    }
    return "?";
}

int var_index(Var v) {
    switch (v) {
        case Var::X0: case Var::Xi0: case Var::Y0: return 0;
        case Var::X1: case Var::Xi1: case Var::Y1: return 1;
        default: return -1;
    }
}

void print_real(const ExprPtr& e, std::ostream& os) {
    switch (e->kind) {
        case NodeKind::Const:
            os << "(const " << num(e->cval) << " 0)";
            return;
        case NodeKind::Variable: {
            os << "(var " << var_name(e->var);
            int i = var_index(e->var);
            if (i >= 0) os << ' ' << i;
            os << ')';
            return;
        }
        case NodeKind::Add: os << "(add "; break;
        case NodeKind::Sub: os << "(sub "; break;
        case NodeKind::Mul: os << "(mul "; break;
        case NodeKind::Div: os << "(div "; break;
        case NodeKind::Pow:
            os << "(pow ";
            print_real(e->kids[0], os);
            os << ' ' << num(e->expo) << ')';
            return;
        case NodeKind::Exp: os << "(exp "; break;
        case NodeKind::Log: os << "(log "; break;
        case NodeKind::Sin: os << "(sin "; break;
        case NodeKind::Cos: os << "(cos "; break;
        case NodeKind::JBracket: os << "(jbracket"; break;
        case NodeKind::Smoothstep: os << "(smoothstep "; break;
        case NodeKind::BumpExp:
            os << "(bumpexp " << num(e->expo) << ' ';
            print_real(e->kids[0], os);
            os << ')';
            return;
    }
    if (e->kind == NodeKind::JBracket) {
        for (auto& k : e->kids) {
            os << ' ';
            print_real(k, os);
        }
        os << ')';
        return;
    }
    for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << ' ';
        print_real(e->kids[i], os);
    }
    os << ')';
}

struct Token {
    enum Kind { LParen, RParen, Atom } kind;
    std::string text;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(') {
            out.push_back({Token::LParen, "("});
            ++i;
        } else if (c == ')') {
            out.push_back({Token::RParen, ")"});
            ++i;
        } else {
            size_t j = i;
            while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) &&
                   s[j] != '(' && s[j] != ')')
                ++j;
            out.push_back({Token::Atom, s.substr(i, j - i)});
            i = j;
        }
    }
    return out;
}

struct Parser {
    const std::vector<Token>& toks;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& m) {
        throw ValidationError("s-expression: " + m);
    }
    const Token& peek() {
        if (pos >= toks.size()) fail("unexpected end of input");
        return toks[pos];
    }
    Token take() {
        Token t = peek();
        ++pos;
        return t;
    }
    std::string atom() {
        Token t = take();
        if (t.kind != Token::Atom) fail("expected atom, got '" + t.text + "'");
        return t.text;
    }
    double number() {
        std::string a = atom();
        size_t used = 0;
        double v;
        try {
            v = std::stod(a, &used);
        } catch (const std::exception&) {
            fail("expected number, got '" + a + "'");
        }
        if (used != a.size()) fail("trailing characters in number '" + a + "'");
        return v;
    }

    ComplexExpr real_unary(const std::string& op, const ComplexExpr& a) {
        if (!is_zero_expr(a.im)) fail("'" + op + "' needs a real argument");
        if (op == "exp") return ComplexExpr::real(eexp(a.re));
        if (op == "log") return ComplexExpr::real(elog(a.re));
        if (op == "sin") return ComplexExpr::real(esin(a.re));
        if (op == "cos") return ComplexExpr::real(ecos(a.re));
        if (op == "smoothstep") return ComplexExpr::real(esmoothstep(a.re));
        fail("unknown operator '" + op + "'");
    }

    ComplexExpr expr() {
        Token t = take();
        if (t.kind != Token::LParen) fail("expected '(', got '" + t.text + "'");
        std::string op = atom();
        ComplexExpr result;
        if (op == "const") {
            double re = number(), im = number();
            result = ComplexExpr::constant({re, im});
        } else if (op == "var") {
            std::string name = atom();
            Var v;
            if (name == "eps") {
                v = Var::Eps;
            } else if (name == "t") {
                v = Var::T;
            } else {
                int idx = peek().kind == Token::Atom ? static_cast<int>(number()) : 0;
                if (idx != 0 && idx != 1) fail("variable index must be 0 or 1");
                if (name == "x") v = idx ? Var::X1 : Var::X0;
                else if (name == "xi") v = idx ? Var::Xi1 : Var::Xi0;
                else if (name == "y") v = idx ? Var::Y1 : Var::Y0;
                else fail("unknown variable '" + name + "'");
            }
            result = ComplexExpr::real(evar(v));
        } else if (op == "add" || op == "sub" || op == "mul" || op == "div") {
            ComplexExpr a = expr();
            ComplexExpr b = expr();
            if (op == "add") result = a + b;
            else if (op == "sub") result = a - b;
            else if (op == "mul") result = a * b;
            else if (is_zero_expr(a.im) && is_zero_expr(b.im))
                result = ComplexExpr::real(ediv(a.re, b.re));  // keep real trees intact
            else result = a / b;
        } else if (op == "pow") {
            ComplexExpr a = expr();
            double p = number();
            if (!is_zero_expr(a.im)) fail("'pow' needs a real base");
            result = ComplexExpr::real(epow(a.re, p));
        } else if (op == "neg") {
            ComplexExpr a = expr();
            result = ComplexExpr{eneg(a.re), eneg(a.im)};
        } else if (op == "jbracket") {
            std::vector<ExprPtr> args;
            while (peek().kind != Token::RParen) {
                ComplexExpr a = expr();
                if (!is_zero_expr(a.im)) fail("'jbracket' needs real arguments");
                args.push_back(a.re);
            }
            result = ComplexExpr::real(ejbracket(std::move(args)));
        } else if (op == "bumpexp") {
            double k = number();
            ComplexExpr a = expr();
            if (!is_zero_expr(a.im)) fail("'bumpexp' needs a real argument");
            result = ComplexExpr::real(ebumpexp(k, a.re));
        } else {
            result = real_unary(op, expr());
        }
        Token close = take();
        if (close.kind != Token::RParen) fail("expected ')', got '" + close.text + "'");
        return result;
    }
};

}  // namespace

std::string to_sexpr(const ComplexExpr& e) {
    std::ostringstream os;
    bool has_im = !is_zero_expr(e.im);
    if (!has_im) {
        print_real(e.re, os);
    } else if (is_zero_expr(e.re)) {
        os << "(mul (const 0 1) ";
        print_real(e.im, os);
        os << ')';
    } else {
        os << "(add ";
        print_real(e.re, os);
        os << " (mul (const 0 1) ";
        print_real(e.im, os);
        os << "))";
    }
    return os.str();
}

ComplexExpr parse_sexpr(const std::string& s) {
    std::vector<Token> toks = lex(s);
    if (toks.empty()) throw ValidationError("s-expression: empty input");
    Parser p{toks};
    ComplexExpr e = p.expr();
    if (p.pos != toks.size())
        throw ValidationError("s-expression: trailing tokens after expression");
    return e;
}

}  // namespace mlg
