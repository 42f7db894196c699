#include "mlg/calculus.hpp"

#include <algorithm>
#include <array>

namespace mlg {
namespace {

std::vector<std::array<int, 2>> multi_indices(int dim, int k) {
    std::vector<std::array<int, 2>> out;
    if (dim == 1) {
        out.push_back({k, 0});
    } else {
        for (int i = 0; i <= k; ++i) out.push_back({k - i, i});
    }
    return out;
}

double factorial(int k) {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

ComplexExpr diff_xi(ComplexExpr e, const std::array<int, 2>& g) {
    for (int i = 0; i < g[0]; ++i) e = cdiff(e, Var::Xi0);
    for (int i = 0; i < g[1]; ++i) e = cdiff(e, Var::Xi1);
    return e;
}

ComplexExpr D_var(ComplexExpr e, Var v0, Var v1, const std::array<int, 2>& g) {
    for (int i = 0; i < g[0]; ++i) e = cD(e, v0);
    for (int i = 0; i < g[1]; ++i) e = cD(e, v1);
    return e;
}

SymbolFamily wrap(ComplexExpr e, double order, int dim, const std::string& label) {
    SymbolFamily s;
    s.expr = std::move(e);
    s.order = order;
    s.dim = dim;
    s.label = label;
    return s;
}

Expansion assemble(std::vector<ComplexExpr> grouped, double top_order, int dim,
                   const std::string& label) {
    Expansion e;
    e.dim = dim;
    for (size_t k = 0; k < grouped.size(); ++k) {
        if (grouped[k].is_zero()) continue;
        double ord = top_order - static_cast<double>(k);
        e.terms.push_back({ord, wrap(grouped[k], ord, dim,
                                     label + "[" + std::to_string(k) + "]")});
    }
    return e;
}

constexpr int kDerivCap = 12;

}  // namespace

Expansion expand_compose(const SymbolFamily& a, const SymbolFamily& b, int r) {
    if (r < 1) throw ValidationError("need r >= 1");
    if (a.dim != b.dim) throw ValidationError("dimension mismatch");
    if (r - 1 > kDerivCap) throw CapExceeded("expansion order beyond derivative cap");
    std::vector<ComplexExpr> grouped;
    for (int k = 0; k < r; ++k) {
        ComplexExpr term = ComplexExpr::constant(0.0);
        for (auto& g : multi_indices(a.dim, k)) {
            double c = 1.0 / (factorial(g[0]) * factorial(g[1]));
            term = term + c * (diff_xi(a.expr, g) * D_var(b.expr, Var::X0, Var::X1, g));
        }
        grouped.push_back(term);
    }
    return assemble(std::move(grouped), a.order + b.order, a.dim, "compose");
}

Expansion expand_adjoint(const SymbolFamily& a, int r) {
    if (r < 1) throw ValidationError("need r >= 1");
    if (r - 1 > kDerivCap / 2) throw CapExceeded("expansion order beyond derivative cap");
    std::vector<ComplexExpr> grouped;
    ComplexExpr ac = conj(a.expr);
    for (int k = 0; k < r; ++k) {
        ComplexExpr term = ComplexExpr::constant(0.0);
        for (auto& g : multi_indices(a.dim, k)) {
            double c = 1.0 / (factorial(g[0]) * factorial(g[1]));
            term = term + c * D_var(diff_xi(ac, g), Var::X0, Var::X1, g);
        }
        grouped.push_back(term);
    }
    return assemble(std::move(grouped), a.order, a.dim, "adjoint");
}

Expansion expand_transpose(const SymbolFamily& a, int r) {
    if (r < 1) throw ValidationError("need r >= 1");
    if (r - 1 > kDerivCap / 2) throw CapExceeded("expansion order beyond derivative cap");
    std::map<Var, ExprPtr> flip = {{Var::Xi0, eneg(evar(Var::Xi0))},
                                   {Var::Xi1, eneg(evar(Var::Xi1))}};
    ComplexExpr am = csubst(a.expr, flip);
    std::vector<ComplexExpr> grouped;
    for (int k = 0; k < r; ++k) {
        ComplexExpr term = ComplexExpr::constant(0.0);
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        for (auto& g : multi_indices(a.dim, k)) {
            double c = sign / (factorial(g[0]) * factorial(g[1]));
            term = term + c * D_var(diff_xi(am, g), Var::X0, Var::X1, g);
        }
        grouped.push_back(term);
    }
    return assemble(std::move(grouped), a.order, a.dim, "transpose");
}

Expansion reduce_amplitude(const ComplexExpr& b, int dim, double order, int r) {
    if (r < 1) throw ValidationError("need r >= 1");
    if (r - 1 > kDerivCap / 2) throw CapExceeded("expansion order beyond derivative cap");
    std::map<Var, ExprPtr> on_diag = {{Var::Y0, evar(Var::X0)}, {Var::Y1, evar(Var::X1)}};
    std::vector<ComplexExpr> grouped;
    for (int k = 0; k < r; ++k) {
        ComplexExpr term = ComplexExpr::constant(0.0);
        for (auto& g : multi_indices(dim, k)) {
            double c = 1.0 / (factorial(g[0]) * factorial(g[1]));
            ComplexExpr d = D_var(diff_xi(b, g), Var::Y0, Var::Y1, g);
            term = term + c * csubst(d, on_diag);
        }
        grouped.push_back(term);
    }
    return assemble(std::move(grouped), order, dim, "amplitude");
}

namespace {

// Radial excision: 0 for |xi| <= t/2, 1 for |xi| >= t.
ExprPtr excision(int dim, double t) {
    ExprPtr sq = emul(evar(Var::Xi0), evar(Var::Xi0));
    if (dim == 2) sq = eadd(sq, emul(evar(Var::Xi1), evar(Var::Xi1)));
    ExprPtr norm = epow(eadd(sq, econst(1e-60)), 0.5);
    return esmoothstep(esub(emul(econst(2.0 / t), norm), econst(1)));
}

double jbr(double r) { return std::sqrt(1.0 + r * r); }

}  // namespace

BorelSumResult borel_sum(const Expansion& e, const std::vector<SamplingBox>& probe_boxes,
                         const EpsilonGrid& grid) {
    if (e.terms.size() < 2) throw ValidationError("expansion needs at least 2 terms");

    // Witness net: (0,0)-seminorm of the leading term over the probe boxes.
    std::vector<double> witness(grid.count(), 0.0);
    if (e.common_witness) {
        for (int i = 0; i < grid.count(); ++i)
            witness[i] = e.common_witness->values[i];
    } else {
        for (auto& K : probe_boxes) {
            NetSample w = estimate_seminorm(e.terms[0].term, K, {0, 0}, {0, 0},
                                            e.terms[0].order, grid);
            for (int i = 0; i < grid.count(); ++i)
                witness[i] = std::max(witness[i], w.values[i]);
        }
    }

    int dim = e.dim;
    BorelSumResult out;
    ComplexExpr sum = ComplexExpr::constant(0.0);
    double t_prev = 1.0;
    for (size_t j = 0; j < e.terms.size(); ++j) {
        double t;
        if (j == 0) {
            t = 1.0;
        } else {
            t = std::max(2.0 * t_prev, 2.0);
            double m_prev = e.terms[j - 1].order;
            for (;; t *= 2) {
                if (t > 1073741824.0)
                    throw NoAdmissibleRadius("cut radius search exceeded 2^30");
                // sup_{x in boxes, |xi| >= t/2} <xi>^(-m_prev) |chi(xi/t) term_j|
                ComplexExpr gated{emul(excision(dim, t), e.terms[j].term.expr.re),
                                  emul(excision(dim, t), e.terms[j].term.expr.im)};
                std::vector<double> radii;
                for (double f : {0.5, 0.625, 0.75, 1.0, 1.5, 2.0, 4.0, 8.0, 16.0})
                    radii.push_back(f * t);
                bool ok = true;
                for (int i = 0; i < grid.count() && ok; ++i) {
                    double eps = grid.eps(i);
                    double sup = 0;
                    EvalPoint p;
                    p.eps = eps;
                    int ndirs = dim == 1 ? 2 : 16;
                    for (double r : radii) {
                        double w = std::pow(jbr(r), -m_prev);
                        for (int d = 0; d < ndirs; ++d) {
                            if (dim == 1) {
                                p.xi[0] = d == 0 ? r : -r;
                            } else {
                                p.xi[0] = r * std::cos(kTwoPi * d / ndirs);
                                p.xi[1] = r * std::sin(kTwoPi * d / ndirs);
                            }
                            for (auto& K : probe_boxes) {
                                int ppa = std::max(K.points_per_axis, 1);
                                for (int ix = 0; ix < ppa; ++ix) {
                                    double f0 = ppa == 1 ? 0.0 : -1.0 + 2.0 * ix / (ppa - 1);
                                    p.x[0] = K.center[0] + f0 * K.half_widths[0];
                                    int jm = dim == 1 ? 1 : ppa;
                                    for (int iy = 0; iy < jm; ++iy) {
                                        double f1 =
                                            ppa == 1 ? 0.0 : -1.0 + 2.0 * iy / (ppa - 1);
                                        p.x[1] = dim == 1
                                                     ? 0.0
                                                     : K.center[1] + f1 * K.half_widths[1];
                                        sup = std::max(sup, w * std::abs(gated(p)));
                                    }
                                }
                            }
                        }
                    }
                    ok = sup <= std::ldexp(1.0, -static_cast<int>(j)) * (1.0 + witness[i]);
                }
                if (ok) break;
            }
        }
        out.cut_radii.push_back(t);
        t_prev = t;
        ExprPtr chi = excision(dim, t);
        sum = sum + ComplexExpr{emul(chi, e.terms[j].term.expr.re),
                                emul(chi, e.terms[j].term.expr.im)};
        ++out.terms_used;
    }

    out.symbol = e.terms[0].term;
    out.symbol.expr = sum;
    out.symbol.order = e.terms[0].order;
    out.symbol.dim = dim;
    out.symbol.label = "borel_sum";

    // Remainder check (r = 1, 2): fitted order of symbol - partial sum.
    SamplingBox K0 = probe_boxes.empty() ? SamplingBox{} : probe_boxes[0];
    for (int r = 1; r <= 2 && r < static_cast<int>(e.terms.size()); ++r) {
        ComplexExpr rem = sum - e.partial_sum(r);
        if (rem.is_zero()) continue;
        SymbolFamily rs = wrap(rem, e.terms[r].order, dim, "borel_remainder");
        double fitted;
        try {
            fitted = estimate_order(rs, K0, grid);
        } catch (const OrderNotFound&) {
            throw ValidationError("borel remainder order not measurable");
        }
        if (fitted > e.terms[r].order + 0.25)
            throw ValidationError("borel remainder order check failed");
    }
    return out;
}

ParametrixResult parametrix(const SymbolFamily& a, int r,
                            const std::vector<SamplingBox>& probe_boxes,
                            const ConeGrid& cones, const EpsilonGrid& grid) {
    if (r < 1) throw ValidationError("need r >= 1");
    EllipticityReport rep = microellipticity_report(a, probe_boxes, cones, grid);
    if (!rep.all_slow_scale_elliptic())
        throw NotElliptic("symbol is not slow-scale elliptic on every sector");
    double R = 0;
    for (auto& c : rep.cells)
        for (double v : c.r_net.values) R = std::max(R, v);
    R = std::max(R, 1.0);

    ComplexExpr one = ComplexExpr::constant(1.0);
    ComplexExpr b0;
    if (a.xi_independent()) {
        b0 = one / a.expr;
    } else {
        // excision vanishing for |xi| <= R, 1 for |xi| >= 2R
        ExprPtr sq = emul(evar(Var::Xi0), evar(Var::Xi0));
        if (a.dim == 2) sq = eadd(sq, emul(evar(Var::Xi1), evar(Var::Xi1)));
        ExprPtr norm = epow(eadd(sq, econst(1e-60)), 0.5);
        ExprPtr chi = esmoothstep(esub(ediv(norm, econst(R)), econst(1)));
        b0 = ComplexExpr{chi, econst(0)} / a.expr;
    }

    std::vector<ComplexExpr> b{b0};
    for (int k = 1; k < r; ++k) {
        ComplexExpr acc = ComplexExpr::constant(0.0);
        for (int j = 0; j < k; ++j) {
            int gk = k - j;
            for (auto& g : multi_indices(a.dim, gk)) {
                double c = 1.0 / (factorial(g[0]) * factorial(g[1]));
                acc = acc + c * (diff_xi(a.expr, g) * D_var(b[j], Var::X0, Var::X1, g));
            }
        }
        b.push_back(ComplexExpr::constant(0.0) - (b0 * acc));
    }

    ParametrixResult res;
    res.excision_radius = R;
    res.expansion.dim = a.dim;
    for (int k = 0; k < r; ++k) {
        if (b[k].is_zero()) continue;
        double ord = -a.order - k;
        res.expansion.terms.push_back(
            {ord, wrap(b[k], ord, a.dim, "parametrix[" + std::to_string(k) + "]")});
    }
    if (res.expansion.terms.size() >= 2) {
        res.truncated_symbol = borel_sum(res.expansion, probe_boxes, grid).symbol;
    } else {
        res.truncated_symbol = res.expansion.terms[0].term;
    }
    res.truncated_symbol.label = "parametrix";
    SamplingBox K0 = probe_boxes.empty() ? SamplingBox{} : probe_boxes[0];
    res.residual_order_estimate = expansion_residual_order(a, res, r, K0, grid);
    return res;
}

double expansion_residual_order(const SymbolFamily& a, const ParametrixResult& p, int r,
                                const SamplingBox& K, const EpsilonGrid& grid) {
    // (a # p)(x, xi) truncated at r terms, minus 1.
    ComplexExpr ptrunc = p.expansion.partial_sum(r);
    ComplexExpr acc = ComplexExpr::constant(0.0);
    for (int k = 0; k < r; ++k) {
        for (auto& g : multi_indices(a.dim, k)) {
            double c = 1.0 / (factorial(g[0]) * factorial(g[1]));
            acc = acc + c * (diff_xi(a.expr, g) * D_var(ptrunc, Var::X0, Var::X1, g));
        }
    }
    ComplexExpr res = acc - ComplexExpr::constant(1.0);
    if (res.is_zero()) return -10.0;
    SymbolFamily rs = wrap(res, 0.0, a.dim, "parametrix_residual");
    return estimate_order(rs, K, grid);
}

double composition_residual_order(const SymbolFamily& a, const SymbolFamily& b, int r,
                                  const GridSpec& spec, const EpsilonGrid& grid) {
    Expansion e = expand_compose(a, b, r);
    ComplexExpr trunc = e.partial_sum(static_cast<int>(e.terms.size()));

    std::vector<double> lk, lv;
    double cmax = 0;
    std::vector<int> freqs;
    for (int k = 4; k <= spec.G / 4; k *= 2) freqs.push_back(k);
    for (int kf : freqs) {
        // diagonal probe direction in 2d: on-axis probes miss the generic
        // derivative orders of rotationally invariant symbols
        int kvec[2] = {kf, spec.n == 2 ? kf : 0};
        double worst = 0;
        for (int i = 0; i < grid.count(); ++i) {
            double eps = grid.eps(i);
            auto exact = plane_wave_composition(a, b, spec, kvec, eps);
            EvalPoint p;
            p.eps = eps;
            p.xi[0] = kvec[0];
            p.xi[1] = kvec[1];
            for (long long m = 0; m < spec.size(); ++m) {
                if (spec.n == 1) {
                    p.x[0] = spec.point(static_cast<int>(m));
                } else {
                    p.x[0] = spec.point(static_cast<int>(m / spec.G));
                    p.x[1] = spec.point(static_cast<int>(m % spec.G));
                }
                cplx approx = trunc(p);
                worst = std::max(worst, std::abs(exact[m] - approx));
                cmax = std::max(cmax, std::abs(exact[m]));
            }
        }
        double k2 = static_cast<double>(kvec[0]) * kvec[0] +
                    static_cast<double>(kvec[1]) * kvec[1];
        lk.push_back(std::log2(std::sqrt(1.0 + k2)));
        lv.push_back(worst);
    }
    bool all_zero = true;
    for (double v : lv) all_zero = all_zero && v <= 1e-12 * (1.0 + cmax);
    if (all_zero) return -10.0;
    std::vector<double> ly;
    for (double v : lv) ly.push_back(std::log2(std::max(v, 1e-300)));
    return fit_line(lk, ly).slope;
}

}  // namespace mlg
