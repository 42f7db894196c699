#include "mlg/symbols.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace mlg {

cplx eval_symbol(const SymbolFamily& a, const double* x, const double* xi, double eps,
                 double t) {
    EvalPoint p;
    p.x[0] = x[0];
    p.xi[0] = xi[0];
    if (a.dim > 1) {
        p.x[1] = x[1];
        p.xi[1] = xi[1];
    }
    p.eps = eps;
    p.t = t;
    return a.expr(p);
}

SymbolFamily diff_symbol(const SymbolFamily& a, const std::vector<int>& alpha,
                         const std::vector<int>& beta, int cap) {
    int total = 0;
    for (int k : alpha) total += k;
    for (int k : beta) total += k;
    if (total > cap) throw CapExceeded("derivative order beyond cap");

    static const Var xi_vars[2] = {Var::Xi0, Var::Xi1};
    static const Var x_vars[2] = {Var::X0, Var::X1};
    SymbolFamily d = a;
    int order_drop = 0;
    for (size_t i = 0; i < alpha.size() && i < 2; ++i)
        for (int k = 0; k < alpha[i]; ++k) {
            d.expr = cdiff(d.expr, xi_vars[i]);
            ++order_drop;
        }
    for (size_t i = 0; i < beta.size() && i < 2; ++i)
        for (int k = 0; k < beta[i]; ++k) d.expr = cdiff(d.expr, x_vars[i]);
    d.order = a.order - order_drop;
    return d;
}

std::vector<double> default_xi_radii() {
    std::vector<double> r;
    for (int k = 0; k <= 10; ++k) r.push_back(std::ldexp(1.0, k));
    return r;
}

namespace {

std::vector<std::array<double, 2>> box_points(const SamplingBox& K, int dim) {
    std::vector<std::array<double, 2>> pts;
    int p = std::max(K.points_per_axis, 1);
    auto coord = [&](int axis, int i) {
        if (p == 1) return K.center[axis];
        double f = static_cast<double>(i) / (p - 1);
        return K.center[axis] - K.half_widths[axis] + 2 * f * K.half_widths[axis];
    };
    if (dim == 1) {
        for (int i = 0; i < p; ++i) pts.push_back({coord(0, i), 0.0});
    } else {
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) pts.push_back({coord(0, i), coord(1, j)});
    }
    return pts;
}

std::vector<std::array<double, 2>> sphere_dirs(int dim, int count = 16) {
    std::vector<std::array<double, 2>> dirs;
    if (dim == 1) {
        dirs.push_back({1.0, 0.0});
        dirs.push_back({-1.0, 0.0});
    } else {
        for (int d = 0; d < count; ++d) {
            double th = kTwoPi * d / count;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    }
    return dirs;
}

// Rays through a sector of the cone grid: center plus fractional offsets of the
// sector half-width.
std::vector<std::array<double, 2>> sector_rays(const ConeGrid& cones, int sector) {
    std::vector<std::array<double, 2>> dirs;
    if (cones.n == 1) {
        dirs.push_back({sector == 0 ? 1.0 : -1.0, 0.0});
        return dirs;
    }
    double hw = kTwoPi / cones.D;
    for (double f : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        double th = cones.center_angle(sector) + f * hw;
        dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
}

double jbr(double r) { return std::sqrt(1.0 + r * r); }

}  // namespace

NetSample estimate_seminorm(const SymbolFamily& a, const SamplingBox& K,
                            const std::vector<int>& alpha, const std::vector<int>& beta,
                            double m, const EpsilonGrid& grid,
                            const std::vector<double>& xi_radii) {
    SymbolFamily d = diff_symbol(a, alpha, beta);
    int aord = 0;
    for (int k : alpha) aord += k;
    auto pts = box_points(K, a.dim);
    auto dirs = sphere_dirs(a.dim);
    std::vector<double> vals(grid.count());
    for (int i = 0; i < grid.count(); ++i) {
        double eps = grid.eps(i);
        double best = 0;
        for (double r : xi_radii) {
            double w = std::pow(jbr(r), aord - m);
            for (auto& u : dirs) {
                double xi[2] = {r * u[0], r * u[1]};
                for (auto& x : pts) {
                    double v = std::abs(eval_symbol(d, x.data(), xi, eps));
                    if (!std::isfinite(v)) throw NonFinite("seminorm sample not finite");
                    best = std::max(best, w * v);
                }
            }
        }
        vals[i] = best;
    }
    return make_net(grid, std::move(vals));
}

namespace {

// Shell profile at fixed eps: per radius, sup over box points and directions of
// <xi>^(-m) |a|.
std::vector<double> shell_profile(const SymbolFamily& a, const SamplingBox& K, double m,
                                  double eps, const std::vector<double>& radii) {
    auto pts = box_points(K, a.dim);
    auto dirs = sphere_dirs(a.dim);
    std::vector<double> prof;
    prof.reserve(radii.size());
    for (double r : radii) {
        double w = std::pow(jbr(r), -m);
        double best = 0;
        for (auto& u : dirs) {
            double xi[2] = {r * u[0], r * u[1]};
            for (auto& x : pts)
                best = std::max(best, w * std::abs(eval_symbol(a, x.data(), xi, eps)));
        }
        prof.push_back(best);
    }
    return prof;
}

// Weighted profile must stop growing on the outer shells (within 10%) for the
// candidate order to dominate the xi growth.
bool profile_tamed(const std::vector<double>& prof, const std::vector<double>& radii,
                   double min_radius = 32.0, double slack = 1.10) {
    for (size_t i = 1; i < prof.size(); ++i) {
        if (radii[i - 1] < min_radius) continue;
        if (prof[i] > slack * prof[i - 1] + 1e-300) return false;
    }
    return true;
}

bool order_admissible(const SymbolFamily& a, const SamplingBox& K, double m,
                      const EpsilonGrid& grid, const std::vector<double>& radii) {
    NetSample net = estimate_seminorm(a, K, {0, 0}, {0, 0}, m, grid, radii);
    try {
        ScaleClass c = classify_scale(net);
        if (c.tag == ScaleTag::Unbounded) return false;
    } catch (const DegenerateFit&) {
        // values at or near the floor: bounded for any order
    }
    // Check the shell profile at the largest eps in the grid.
    auto prof = shell_profile(a, K, m, grid.eps(0), radii);
    return profile_tamed(prof, radii);
}

}  // namespace

double estimate_order(const SymbolFamily& a, const SamplingBox& K,
                      const EpsilonGrid& grid) {
    auto radii = default_xi_radii();
    double lo = -10.0, hi = 10.0;
    if (!order_admissible(a, K, hi, grid, radii))
        throw OrderNotFound("no admissible order in [-10, 10]");
    if (order_admissible(a, K, lo, grid, radii)) return lo;
    while (hi - lo > 0.05) {
        double mid = 0.5 * (lo + hi);
        if (order_admissible(a, K, mid, grid, radii))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

EllipticityReport microellipticity_report(const SymbolFamily& a,
                                          const std::vector<SamplingBox>& boxes,
                                          const ConeGrid& cones, const EpsilonGrid& grid,
                                          const std::vector<double>& xi_radii) {
    constexpr double kRatioCap = 1e8;
    EllipticityReport rep;
    for (int b = 0; b < static_cast<int>(boxes.size()); ++b) {
        auto pts = box_points(boxes[b], a.dim);
        for (int d = 0; d < cones.sector_count(); ++d) {
            auto dirs = sector_rays(cones, d);
            EllipticityCell cell;
            cell.box_id = b;
            cell.sector_id = d;
            bool feasible = true;
            std::vector<double> r_vals(grid.count()), s_vals(grid.count());
            for (int i = 0; i < grid.count() && feasible; ++i) {
                double eps = grid.eps(i);
                // Worst modulus ratio <xi>^m / |a| per shell.
                std::vector<double> worst(xi_radii.size(), 0.0);
                for (size_t s = 0; s < xi_radii.size(); ++s) {
                    double r = xi_radii[s];
                    double w = std::pow(jbr(r), a.order);
                    for (auto& u : dirs) {
                        double xi[2] = {r * u[0], r * u[1]};
                        for (auto& x : pts) {
                            double v = std::abs(eval_symbol(a, x.data(), xi, eps));
                            double ratio =
                                v == 0.0 ? std::numeric_limits<double>::infinity()
                                         : w / v;
                            worst[s] = std::max(worst[s], ratio);
                        }
                    }
                }
                // Smallest shell radius beyond which the lower bound holds.
                int s0 = -1;
                double tail_max = 0;
                for (int s = static_cast<int>(worst.size()) - 1; s >= 0; --s) {
                    if (worst[s] > kRatioCap) break;
                    tail_max = std::max(tail_max, worst[s]);
                    s0 = s;
                }
                if (s0 < 0) {
                    feasible = false;
                    break;
                }
                r_vals[i] = xi_radii[s0];
                s_vals[i] = tail_max;
            }
            if (feasible) {
                cell.r_net = make_net(grid, r_vals);
                cell.s_net = make_net(grid, s_vals);
                ScaleClass rc = classify_scale(cell.r_net);
                ScaleClass sc = classify_scale(cell.s_net);
                cell.r_slope = rc.fit.slope;
                cell.s_slope = sc.fit.slope;
                auto slowish = [](ScaleTag t) {
                    return t == ScaleTag::SlowScale || t == ScaleTag::Negligible;
                };
                auto moderateish = [&](ScaleTag t) {
                    return slowish(t) || t == ScaleTag::Moderate;
                };
                if (slowish(rc.tag) && slowish(sc.tag))
                    cell.verdict = EllVerdict::SlowScaleElliptic;
                else if (moderateish(rc.tag) && moderateish(sc.tag))
                    cell.verdict = EllVerdict::EllipticModerate;
                else
                    cell.verdict = EllVerdict::Characteristic;
            } else {
                cell.verdict = EllVerdict::Characteristic;
            }
            rep.cells.push_back(std::move(cell));
        }
    }
    return rep;
}

std::vector<std::pair<int, int>> characteristic_set(const SymbolFamily& a,
                                                    const std::vector<SamplingBox>& boxes,
                                                    const ConeGrid& cones,
                                                    const EpsilonGrid& grid) {
    EllipticityReport rep = microellipticity_report(a, boxes, cones, grid);
    std::vector<std::pair<int, int>> out;
    for (auto& c : rep.cells)
        if (c.verdict == EllVerdict::Characteristic)
            out.emplace_back(c.box_id, c.sector_id);
    return out;
}

MicrosupportEstimate microsupport_estimate(const SymbolFamily& a,
                                           const std::vector<SamplingBox>& boxes,
                                           const ConeGrid& cones, const EpsilonGrid& grid,
                                           const std::vector<double>& weights,
                                           int max_deriv) {
    auto radii = default_xi_radii();
    MicrosupportEstimate est;

    // Multi-indices with |alpha|+|beta| <= max_deriv (reduced set in 2D to stay
    // cheap: pure partials plus the lowest mixed ones).
    std::vector<std::pair<std::vector<int>, std::vector<int>>> derivs;
    if (a.dim == 1) {
        for (int da = 0; da <= max_deriv; ++da)
            for (int db = 0; db + da <= max_deriv; ++db)
                derivs.push_back({{da, 0}, {db, 0}});
    } else {
        derivs.push_back({{0, 0}, {0, 0}});
        for (int k = 1; k <= max_deriv; ++k) {
            derivs.push_back({{k, 0}, {0, 0}});
            derivs.push_back({{0, k}, {0, 0}});
            derivs.push_back({{0, 0}, {k, 0}});
            derivs.push_back({{0, 0}, {0, k}});
        }
        if (max_deriv >= 2) {
            derivs.push_back({{1, 1}, {0, 0}});
            derivs.push_back({{1, 0}, {1, 0}});
            derivs.push_back({{0, 1}, {0, 1}});
        }
        if (max_deriv >= 4) derivs.push_back({{1, 1}, {1, 1}});
    }

    for (int b = 0; b < static_cast<int>(boxes.size()); ++b) {
        for (int d = 0; d < cones.sector_count(); ++d) {
            MicrosupportCell cell;
            cell.box_id = b;
            cell.sector_id = d;
            auto rays = sector_rays(cones, d);

            // Cone-restricted seminorm net for given weight and derivative.
            auto cone_net = [&](double m, const std::vector<int>& alpha,
                                const std::vector<int>& beta) {
                SymbolFamily da = diff_symbol(a, alpha, beta);
                int aord = 0;
                for (int k : alpha) aord += k;
                auto pts = box_points(boxes[b], a.dim);
                std::vector<double> vals(grid.count());
                for (int i = 0; i < grid.count(); ++i) {
                    double eps = grid.eps(i);
                    double best = 0;
                    for (double r : radii) {
                        if (r < cones.min_radius) continue;
                        double w = std::pow(jbr(r), aord - m);
                        for (auto& u : rays) {
                            double xi[2] = {r * u[0], r * u[1]};
                            for (auto& x : pts)
                                best = std::max(
                                    best, w * std::abs(eval_symbol(da, x.data(), xi, eps)));
                        }
                    }
                    vals[i] = best;
                }
                return make_net(grid, vals);
            };

            // Uniform exponent N* from the plain cone sup.
            NetSample base = cone_net(0.0, {0, 0}, {0, 0});
            double nstar = 0.0;
            if (!base.all_floored()) {
                try {
                    nstar = std::max(0.0, fit_growth_exponent(base).slope);
                } catch (const DegenerateFit&) {
                    nstar = 0.0;
                }
            }
            cell.uniform_exponent = nstar;

            bool smoothing = true;
            for (double m : weights) {
                // Profile over shells must not grow with the <xi>^(-m) weight at
                // the largest eps, else order -infinity fails already at m.
                SymbolFamily restricted = a;
                std::vector<double> prof;
                {
                    auto pts = box_points(boxes[b], a.dim);
                    for (double r : radii) {
                        if (r < cones.min_radius) continue;
                        double w = std::pow(jbr(r), -m);
                        double best = 0;
                        for (auto& u : rays) {
                            double xi[2] = {r * u[0], r * u[1]};
                            for (auto& x : pts)
                                best = std::max(best, w * std::abs(eval_symbol(
                                                          restricted, x.data(), xi,
                                                          grid.eps(0))));
                        }
                        prof.push_back(best);
                    }
                }
                std::vector<double> prad;
                for (double r : radii)
                    if (r >= cones.min_radius) prad.push_back(r);
                if (!profile_tamed(prof, prad)) smoothing = false;

                for (auto& [alpha, beta] : derivs) {
                    NetSample net = cone_net(m, alpha, beta);
                    double slope;
                    if (net.all_floored()) {
                        slope = -std::numeric_limits<double>::infinity();
                    } else {
                        try {
                            slope = fit_growth_exponent(net).slope;
                        } catch (const DegenerateFit&) {
                            slope = -std::numeric_limits<double>::infinity();
                        }
                    }
                    cell.slopes.push_back(slope);
                    if (!(slope <= nstar + 0.5)) smoothing = false;
                }
            }
            cell.smoothing = smoothing;
            est.cells.push_back(std::move(cell));
        }
    }
    return est;
}

SymbolFamily build_cone_cutoff(const std::vector<double>& direction,
                               double inner_halfangle, double outer_halfangle, int n) {
    if (!(inner_halfangle > 0) || !(outer_halfangle > inner_halfangle) ||
        !(outer_halfangle <= kPi))
        throw BadAngles("need 0 < inner < outer <= pi");
    if (n != 1 && n != 2) throw ValidationError("dimension must be 1 or 2");
    double dn = 0;
    for (size_t i = 0; i < direction.size(); ++i) dn += direction[i] * direction[i];
    if (dn == 0) throw ValidationError("zero direction");
    dn = std::sqrt(dn);

    // |xi| with a tiny regularization so the expression is smooth at 0; the
    // radial factor vanishes identically for |xi| < 1/2 anyway.
    ExprPtr xi0 = evar(Var::Xi0);
    ExprPtr sq = emul(xi0, xi0);
    if (n == 2) {
        ExprPtr xi1 = evar(Var::Xi1);
        sq = eadd(sq, emul(xi1, xi1));
    }
    ExprPtr norm = epow(eadd(sq, econst(1e-60)), 0.5);

    // Radial gate: 0 for |xi| <= 1/2, 1 for |xi| >= 1.
    ExprPtr rho = esmoothstep(ediv(esub(norm, econst(0.5)), econst(0.5)));

    // Angular gate via the cosine of the angle to the axis direction.
    ExprPtr dot = emul(econst(direction[0] / dn), xi0);
    if (n == 2) dot = eadd(dot, emul(econst(direction[1] / dn), evar(Var::Xi1)));
    ExprPtr c = ediv(dot, norm);
    double ci = std::cos(inner_halfangle), co = std::cos(outer_halfangle);
    ExprPtr sigma = esmoothstep(ediv(esub(c, econst(co)), econst(ci - co)));

    SymbolFamily s;
    s.expr = ComplexExpr::real(emul(rho, sigma));
    s.order = 0.0;
    s.dim = n;
    s.label = "cone_cutoff";
    return s;
}

ComplexExpr build_proper_cutoff(double diag_width, int n) {
    if (!(diag_width > 0) || diag_width > kPi)
        throw ValidationError("diagonal width must lie in (0, pi]");
    // Periodic chordal distance d(x, y) = sqrt(sum_i 4 sin^2((x_i - y_i)/2)).
    static const Var xv[2] = {Var::X0, Var::X1};
    static const Var yv[2] = {Var::Y0, Var::Y1};
    ExprPtr sum = econst(0);
    for (int i = 0; i < n; ++i) {
        ExprPtr h = emul(econst(0.5), esub(evar(xv[i]), evar(yv[i])));
        ExprPtr s = esin(h);
        sum = eadd(sum, emul(econst(4), emul(s, s)));
    }
    ExprPtr dist = epow(eadd(sum, econst(1e-60)), 0.5);
    ExprPtr chi = esmoothstep(
        ediv(esub(econst(2 * diag_width), dist), econst(diag_width)));
    return ComplexExpr::real(chi);
}

}  // namespace mlg
