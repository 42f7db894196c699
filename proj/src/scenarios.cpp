#include "mlg/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "mlg/calculus.hpp"
#include "mlg/fixtures.hpp"

namespace fs = std::filesystem;

namespace mlg {
namespace {

constexpr double kX0 = kPi / 2 + 0.1;
constexpr double kY0 = kPi + 0.2;

using VP = std::vector<std::pair<int, int>>;

double wrap2pi(double x) {
    double w = std::fmod(x, kTwoPi);
    return w < 0 ? w + kTwoPi : w;
}

int cell_of(double x, int C) {
    int c = static_cast<int>(std::floor(wrap2pi(x) / (kTwoPi / C)));
    return std::min(std::max(c, 0), C - 1);
}

SymbolFamily sym(ComplexExpr e, double order, int dim, std::string label) {
    SymbolFamily a;
    a.expr = std::move(e);
    a.order = order;
    a.dim = dim;
    a.label = std::move(label);
    return a;
}

ExprPtr log2_inv_eps() {
    return ediv(elog(ediv(econst(1), evar(Var::Eps))), econst(std::log(2.0)));
}

// 1 + c_eps (x - pi)^2 with the requested scale of c_eps.
ComplexExpr lorentz_denominator(bool slow) {
    ExprPtr c = slow ? eadd(econst(1), log2_inv_eps()) : ediv(econst(1), evar(Var::Eps));
    ExprPtr z = esub(evar(Var::X0), econst(kPi));
    return ComplexExpr::real(eadd(econst(1), emul(c, emul(z, z))));
}

std::vector<cplx> delta_slice(const GridSpec& spec, double center, double eps) {
    std::vector<cplx> u(spec.G);
    double sum = 0;
    for (int m = 0; m < spec.G; ++m) {
        double x = spec.point(m), v = 0;
        for (double s : {-kTwoPi, 0.0, kTwoPi}) {
            double z = (x - center + s) / eps;
            v += std::exp(-0.5 * z * z);
        }
        u[m] = v;
        sum += v;
    }
    for (auto& v : u) v /= sum * spec.spacing();
    return u;
}

GridFunctionFamily delta_at(const GridSpec& spec, const EpsilonGrid& grid, double center) {
    GridFunctionFamily u;
    u.spec = spec;
    u.eps_grid = grid;
    u.label = "delta_at";
    for (int ji = 0; ji < grid.count(); ++ji)
        u.data.push_back(delta_slice(spec, center, grid.eps(ji)));
    return u;
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fd(double v) { return format_double(v); }

CriterionResult finish(int id, const std::string& name, bool pass, std::string detail,
                       double t0, double limit) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    r.seconds = now_s() - t0;
    r.pass = pass && r.seconds < limit;
    r.detail = std::move(detail);
    if (pass && r.seconds >= limit)
        r.detail += " [exceeded " + fd(limit) + " s budget]";
    return r;
}

// ---------------------------------------------------------------- criterion 1

CriterionResult c1_classify(const std::string& dir) {
    double t0 = now_s();
    EpsilonGrid grid(1, 40);
    struct Case {
        std::string name;
        std::function<double(double)> f;
        ScaleTag truth;
        std::optional<double> exact_slope;
    };
    auto lg = [](double e) { return std::log2(1.0 / e); };
    std::vector<Case> cases = {
        {"one", [](double) { return 1.0; }, ScaleTag::SlowScale, 0.0},
        {"const_7_25", [](double) { return 7.25; }, ScaleTag::SlowScale, 0.0},
        {"const_1e6", [](double) { return 1e6; }, ScaleTag::SlowScale, 0.0},
        {"log", [&](double e) { return lg(e); }, ScaleTag::SlowScale, std::nullopt},
        {"log_sq", [&](double e) { return lg(e) * lg(e); }, ScaleTag::SlowScale, std::nullopt},
        {"log_log", [&](double e) { return std::log(1.0 + lg(e)); }, ScaleTag::SlowScale,
         std::nullopt},
        {"pow_half", [](double e) { return std::pow(e, -0.5); }, ScaleTag::Moderate, 0.5},
        {"pow_one", [](double e) { return 1.0 / e; }, ScaleTag::Moderate, 1.0},
        {"pow_two", [](double e) { return std::pow(e, -2.0); }, ScaleTag::Moderate, 2.0},
        {"pow_five", [](double e) { return std::pow(e, -5.0); }, ScaleTag::Moderate, 5.0},
        {"exp_neg_inv", [](double e) { return std::exp(-1.0 / e); }, ScaleTag::Negligible,
         std::nullopt},
        {"eps_exp_neg_inv", [](double e) { return e * std::exp(-1.0 / e); },
         ScaleTag::Negligible, std::nullopt},
        {"sqrt_eps", [](double e) { return std::sqrt(e); }, ScaleTag::SlowScale, -0.5},
        {"eps_sq", [](double e) { return e * e; }, ScaleTag::SlowScale, -2.0},
        {"log_times_pow", [&](double e) { return lg(e) / e; }, ScaleTag::Moderate,
         std::nullopt},
        {"three_pow_two", [](double e) { return 3.0 * std::pow(e, -2.0); },
         ScaleTag::Moderate, 2.0},
        {"five_log_sq", [&](double e) { return 5.0 * lg(e) * lg(e); }, ScaleTag::SlowScale,
         std::nullopt},
        {"pow_half_times_log", [&](double e) { return std::pow(e, -0.5) * lg(e); },
         ScaleTag::Moderate, std::nullopt},
        {"pow5_exp_neg_inv", [](double e) { return std::pow(e, -5.0) * std::exp(-1.0 / e); },
         ScaleTag::Negligible, std::nullopt},
        {"one_plus_eps", [](double e) { return 1.0 + e; }, ScaleTag::SlowScale,
         std::nullopt},
    };
    std::vector<std::pair<std::string, ScaleClass>> rows;
    int mismatches = 0;
    double worst_slope_err = 0.0;
    for (auto& c : cases) {
        ScaleClass cls = classify_scale(sample_net(c.f, grid));
        rows.push_back({c.name, cls});
        if (cls.tag != c.truth) ++mismatches;
        if (c.exact_slope && cls.tag != ScaleTag::Negligible)
            worst_slope_err =
                std::max(worst_slope_err, std::abs(cls.fit.slope - *c.exact_slope));
    }
    write_text(dir + "/classify.csv", classification_csv(rows));
    bool pass = mismatches == 0 && worst_slope_err <= 1e-9;
    return finish(1, "scale classification catalog", pass,
                  "mismatches=" + std::to_string(mismatches) +
                      " max_pure_power_slope_err=" + fd(worst_slope_err),
                  t0, 1.0);
}

// ---------------------------------------------------------------- criterion 2

CriterionResult c2_ginf(const std::string& dir) {
    double t0 = now_s();
    GridSpec spec(1, 512);
    EpsilonGrid grid(1, 10);
    auto slow = make_fixture("slow_lorentz", spec, grid);
    auto fast = make_fixture("fast_lorentz", spec, grid);
    GinfReport rs = ginf_verdict(slow, 6);
    GinfReport rf = ginf_verdict(fast, 6);
    std::vector<double> ord;
    for (size_t i = 0; i < rf.exponents.size(); ++i) ord.push_back(static_cast<double>(i));
    double slope = fit_line(ord, rf.exponents).slope;
    nlohmann::json j = {
        {"slow", {{"verdict", rs.verdict}, {"exponents", rs.exponents}, {"spread", rs.spread}}},
        {"fast",
         {{"verdict", rf.verdict}, {"exponents", rf.exponents}, {"slope_per_order", slope}}}};
    write_text(dir + "/ginf.json", j.dump(2) + "\n");
    bool pass = rs.verdict && !rf.verdict && slope >= 0.4;
    return finish(2, "G-infinity iff slow-scale coefficient", pass,
                  "slow=" + std::string(rs.verdict ? "true" : "false") +
                      " fast=" + std::string(rf.verdict ? "true" : "false") +
                      " fast_slope=" + fd(slope),
                  t0, 10.0);
}

// ---------------------------------------------------------------- criterion 3

std::vector<cplx> enveloped_input(const GridSpec& spec, uint64_t seed) {
    auto u = random_bandlimited(spec, 8, seed);
    for (int m = 0; m < spec.G; ++m) {
        double z = spec.point(m) - kPi;
        u[m] *= std::exp(-z * z / (2 * 0.40 * 0.40));
    }
    return u;
}

CriterionResult c3_exactness(const std::string& dir) {
    double t0 = now_s();
    GridSpec spec(1, 512);
    auto a = sym(ComplexExpr::real(evar(Var::Xi0)), 1, 1, "xi");
    auto b = sym(ComplexExpr::real(evar(Var::X0)), 0, 1, "x");
    Expansion comp = expand_compose(a, b, 2);
    auto comp_sym = sym(comp.partial_sum(2), 1, 1, "xi#x");
    auto axy = sym(ComplexExpr{emul(evar(Var::X0), evar(Var::Xi0)), econst(0)}, 1, 1, "xxi");
    Expansion adj = expand_adjoint(axy, 2);
    auto adj_sym = sym(adj.partial_sum(2), 1, 1, "xxi*");
    double w = spec.cell_weight();
    auto ip = [&](const std::vector<cplx>& f, const std::vector<cplx>& g) {
        cplx s = 0;
        for (size_t m = 0; m < f.size(); ++m) s += f[m] * std::conj(g[m]);
        return s * w;
    };
    auto nrm = [&](const std::vector<cplx>& f) { return std::sqrt(std::abs(ip(f, f))); };
    double comp_err = 0, adj_err = 0;
    std::vector<cplx> bu, lhs, rhs, av, au;
    for (uint64_t s = 0; s < 20; ++s) {
        auto u = enveloped_input(spec, 100 + 2 * s);
        auto v = enveloped_input(spec, 101 + 2 * s);
        apply_symbol(b, spec, 1.0, u, bu);
        apply_symbol(a, spec, 1.0, bu, lhs);
        apply_symbol(comp_sym, spec, 1.0, u, rhs);
        double num = 0, den = 0;
        for (int m = 0; m < spec.G; ++m) {
            num += std::norm(lhs[m] - rhs[m]);
            den += std::norm(rhs[m]);
        }
        comp_err = std::max(comp_err, std::sqrt(num / den));
        apply_symbol(axy, spec, 1.0, u, au);
        apply_symbol(adj_sym, spec, 1.0, v, av);
        double gap = std::abs(ip(au, v) - ip(u, av));
        adj_err = std::max(adj_err, gap / (nrm(u) * nrm(v)));
    }
    nlohmann::json j = {{"composition_max_rel_err", comp_err},
                        {"adjoint_max_duality_gap", adj_err}};
    write_text(dir + "/compose.json", j.dump(2) + "\n");
    bool pass = comp_err <= 1e-10 && adj_err <= 1e-10;
    return finish(3, "first-order calculus exactness", pass,
                  "composition=" + fd(comp_err) + " adjoint=" + fd(adj_err), t0, 5.0);
}

// ---------------------------------------------------------------- criterion 4

CriterionResult c4_truncation(const std::string& dir) {
    double t0 = now_s();
    // 2d: on-axis 1d probes hit the accidental extra decay of d^2<xi>/dxi^2
    // and skip an order; generic class orders need a transverse component
    GridSpec spec(2, 512);
    EpsilonGrid grid(1, 6);
    auto a = sym(ComplexExpr::real(ejbracket({evar(Var::Xi0), evar(Var::Xi1)})), 1, 2,
                 "bracket_xi_2d");
    auto b = sym(ComplexExpr::real(esin(evar(Var::X0))), 0, 2, "sin_x");
    std::vector<std::pair<int, double>> orders;
    for (int r = 1; r <= 4; ++r)
        orders.push_back({r, composition_residual_order(a, b, r, spec, grid)});
    write_text(dir + "/residual.csv", residual_csv(orders));
    bool pass = true;
    std::string detail;
    for (size_t i = 0; i + 1 < orders.size(); ++i) {
        double d = orders[i + 1].second - orders[i].second;
        pass = pass && d >= -1.3 && d <= -0.7;
        detail += (i ? " " : "") + fd(d);
    }
    return finish(4, "remainder order drops per truncation step", pass,
                  "order_steps=[" + detail + "]", t0, 30.0);
}

// ---------------------------------------------------------------- criterion 5

CriterionResult c5_parametrix(const std::string& dir) {
    double t0 = now_s();
    GridSpec spec(1, 256);
    EpsilonGrid grid(1, 6);
    ConeGrid cones;
    cones.n = 1;
    cones.min_radius = 8;
    std::vector<SamplingBox> boxes(1);
    boxes[0].center[0] = kPi;
    boxes[0].half_widths[0] = kPi;

    auto a = sym(ComplexExpr::real(
                     eadd(econst(1), emul(evar(Var::Xi0), evar(Var::Xi0)))),
                 2, 1, "one_plus_xi2");
    ParametrixResult p = parametrix(a, 3, boxes, cones, grid);
    double R = p.excision_radius;
    int klo = static_cast<int>(std::ceil(2 * R)) + 1;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist;
    std::vector<cplx> hat(spec.G, cplx(0, 0));
    for (int k = klo; k <= spec.G / 4; ++k) {
        hat[k] = cplx(dist(rng), dist(rng));
        hat[spec.G - k] = cplx(dist(rng), dist(rng));
    }
    std::vector<cplx> u, w, z;
    fft_inverse(spec, hat, u);
    apply_symbol(a, spec, 1.0, u, w);
    apply_symbol(p.truncated_symbol, spec, 1.0, w, z);
    double num = 0, den = 0;
    for (int m = 0; m < spec.G; ++m) {
        num += std::norm(z[m] - u[m]);
        den += std::norm(u[m]);
    }
    double const_err = std::sqrt(num / den);

    auto a2 = sym(lorentz_denominator(true), 0, 1, "slow_coeff");
    EpsilonGrid grid8(1, 8);
    ParametrixResult p2 = parametrix(a2, 3, boxes, cones, grid8);
    double var_err = 0;
    std::vector<cplx> ones(spec.G, cplx(1, 0)), ue, back;
    for (int ji = 0; ji < grid8.count(); ++ji) {
        double eps = grid8.eps(ji);
        apply_symbol(p2.truncated_symbol, spec, eps, ones, ue);
        apply_symbol(a2, spec, eps, ue, back);
        for (int m = 0; m < spec.G; ++m)
            var_err = std::max(var_err, std::abs(back[m] - cplx(1, 0)));
    }
    nlohmann::json j = {{"const_excision_radius", R},
                        {"const_rel_err", const_err},
                        {"const_residual_order", p.residual_order_estimate},
                        {"var_max_residual", var_err}};
    write_text(dir + "/parametrix.json", j.dump(2) + "\n");
    bool pass = const_err <= 1e-8 && var_err <= 1e-10;
    return finish(5, "parametrix inverts above excision", pass,
                  "const=" + fd(const_err) + " variable=" + fd(var_err), t0, 10.0);
}

// ------------------------------------------------------------ criteria 6 -- 7

struct WfChecks {
    bool pass = true;
    std::string detail;
};

// Singular cells must sit in the one-cell dilation of the core cells, the core
// must be singular in every sector with slope in [0.7, 1.3], and everything
// outside the dilation must be regular with slope <= 0.15.
WfChecks check_point_wf(const WavefrontEstimate& wf, const CellDecomposition& cells,
                        const std::vector<int>& core_cells, int nsec) {
    WfChecks out;
    VP core;
    for (int c : core_cells)
        for (int d = 0; d < nsec; ++d) core.push_back({c, d});
    VP allowed = dilate_cell_sector(core, cells.C, cells.spec.n, nsec);
    std::set<int> allowed_cells;
    for (auto& [c, d] : allowed) allowed_cells.insert(c);
    std::set<int> core_set(core_cells.begin(), core_cells.end());
    std::set<int> singular_cells;
    for (auto& [key, v] : wf.verdicts) {
        auto [c, d] = key;
        bool in = allowed_cells.count(c) > 0;
        if (!v.regular) {
            singular_cells.insert(c);
            if (!in) {
                out.pass = false;
                out.detail += " stray_cell=" + std::to_string(c);
            }
            // the slope window is asserted on the cells meeting x0; dilation
            // neighbours see only a window-attenuated part of the peak
            if (core_set.count(c) && !(v.slope >= 0.7 && v.slope <= 1.3)) {
                out.pass = false;
                out.detail += " bad_slope(" + std::to_string(c) + "," + std::to_string(d) +
                              ")=" + fd(v.slope);
            }
        } else if (!in && v.slope > 0.15) {
            out.pass = false;
            out.detail += " far_slope(" + std::to_string(c) + ")=" + fd(v.slope);
        }
    }
    for (int c : core_cells)
        for (int d = 0; d < nsec; ++d) {
            auto it = wf.verdicts.find({c, d});
            if (it == wf.verdicts.end() || it->second.regular) {
                out.pass = false;
                out.detail += " core_missed(" + std::to_string(c) + "," +
                              std::to_string(d) + ")";
            }
        }
    // Marked cells carry the full sector fan.
    for (int c : singular_cells)
        for (int d = 0; d < nsec; ++d) {
            auto it = wf.verdicts.find({c, d});
            if (it == wf.verdicts.end() || it->second.regular) {
                out.pass = false;
                out.detail += " partial_cell=" + std::to_string(c);
            }
        }
    return out;
}

CriterionResult c6_delta_wf(const std::string& dir) {
    double t0 = now_s();
    GridSpec s1(1, 256);
    EpsilonGrid grid(1, 8);
    CellDecomposition cells1(s1, 8);
    ConeGrid cones1;
    cones1.n = 1;
    cones1.min_radius = s1.G / 8.0;
    auto u1 = make_fixture("delta", s1, grid);
    write_mlgf(dir + "/delta.mlgf", u1);
    auto u1b = read_mlgf(dir + "/delta.mlgf");
    bool rt = u1b.data == u1.data && u1b.spec.G == u1.spec.G;
    auto wf1 = wavefront_estimate(u1, cells1, cones1);
    write_text(dir + "/wavefront_delta1.csv", wavefront_csv(wf1, cells1, cones1));
    WfChecks k1 = check_point_wf(wf1, cells1, {cell_of(kX0, 8)}, 2);

    GridSpec s2(2, 128);
    CellDecomposition cells2(s2, 8);
    ConeGrid cones2;
    cones2.n = 2;
    cones2.D = 16;
    // G/8 = 16 leaves under two octaves of fit band at G = 128 and the core
    // sectors saturate instead of fitting cleanly
    cones2.min_radius = 8;
    auto u2 = make_fixture("delta2d", s2, grid);
    auto wf2 = wavefront_estimate(u2, cells2, cones2);
    write_text(dir + "/wavefront_delta2.csv", wavefront_csv(wf2, cells2, cones2));
    int core2 = cell_of(kX0, 8) * 8 + cell_of(kY0, 8);
    WfChecks k2 = check_point_wf(wf2, cells2, {core2}, 16);

    bool pass = rt && k1.pass && k2.pass;
    return finish(6, "point-mass wave front localization", pass,
                  std::string(rt ? "" : " mlgf_roundtrip_failed") + "1d:" +
                      (k1.pass ? "ok" : k1.detail) + " 2d:" + (k2.pass ? "ok" : k2.detail),
                  t0, 60.0);
}

CriterionResult c7_directional(const std::string& dir) {
    double t0 = now_s();
    GridSpec spec(2, 256);
    EpsilonGrid grid(1, 8);
    CellDecomposition cells(spec, 8);
    ConeGrid cones;
    cones.n = 2;
    cones.D = 16;
    cones.min_radius = spec.G / 8.0;
    auto u = make_fixture("heaviside2d", spec, grid);
    auto wf = wavefront_estimate(u, cells, cones);
    write_text(dir + "/wavefront_heaviside2.csv", wavefront_csv(wf, cells, cones));

    std::set<int> axis_sectors, near_e2;
    double width = kTwoPi / cones.D;
    for (int d = 0; d < cones.D; ++d) {
        if (cones.contains(d, 1, 0) || cones.contains(d, -1, 0)) axis_sectors.insert(d);
        double th = cones.center_angle(d);
        double d_up = std::abs(std::remainder(th - kPi / 2, kTwoPi));
        double d_dn = std::abs(std::remainder(th + kPi / 2, kTwoPi));
        // strictly inside: sectors at exactly 3 widths still contain +-e1 in
        // their overlap span and are legitimately singular
        if (std::min(d_up, d_dn) < 3 * width - 1e-12) near_e2.insert(d);
    }
    std::set<int> jump_cells = {cell_of(kX0, 8), cell_of(kX0 + kPi, 8)};
    std::set<int> allowed_x;
    for (int c : jump_cells)
        for (int dc = -1; dc <= 1; ++dc) allowed_x.insert(((c + dc) % 8 + 8) % 8);

    bool pass = true;
    std::string detail;
    std::set<int> seen_sectors;
    std::set<int> seen_jump;
    for (auto& [key, v] : wf.verdicts) {
        auto [c, d] = key;
        if (v.regular) continue;
        seen_sectors.insert(d);
        int cx = cells.cell_x(c);
        if (jump_cells.count(cx)) seen_jump.insert(cx);
        if (!axis_sectors.count(d)) {
            pass = false;
            detail += " off_axis_sector=" + std::to_string(d);
        }
        if (near_e2.count(d)) {
            pass = false;
            detail += " near_e2_singular=" + std::to_string(d);
        }
        if (!allowed_x.count(cx)) {
            pass = false;
            detail += " stray_x_cell=" + std::to_string(cx);
        }
    }
    if (seen_sectors != axis_sectors) {
        pass = false;
        detail += " sector_set_mismatch";
    }
    if (seen_jump.size() != jump_cells.size()) {
        pass = false;
        detail += " jump_cell_missed";
    }
    return finish(7, "directional resolution of a straight jump", pass,
                  pass ? "sectors_match" : detail, t0, 60.0);
}

// ---------------------------------------------------------------- criterion 8

CriterionResult c8_microlocality(const std::string& dir) {
    double t0 = now_s();
    GridSpec spec(2, 256);
    EpsilonGrid grid(1, 8);
    CellDecomposition cells(spec, 8);
    ConeGrid cones;
    cones.n = 2;
    cones.D = 16;
    cones.min_radius = spec.G / 8.0;
    auto u = make_fixture("heaviside2d", spec, grid);
    auto chi = build_cone_cutoff({0.0, 1.0}, kPi / 8, kPi / 4, 2);
    auto v = quantize_kn(chi, u);
    auto wf_v = wavefront_estimate(v, cells, cones);
    bool empty = wf_v.singular_set().empty();
    InclusionReport incl = verify_microlocality(chi, u, cells, cones);

    GridSpec s1(1, 256);
    CellDecomposition cells1(s1, 8);
    ConeGrid cones1;
    cones1.n = 1;
    cones1.min_radius = s1.G / 8.0;
    auto ud = make_fixture("delta", s1, grid);
    auto one = sym(ComplexExpr::constant(1.0), 0, 1, "one");
    auto ud2 = quantize_kn(one, ud);
    auto wa = wavefront_estimate(ud, cells1, cones1);
    auto wb = wavefront_estimate(ud2, cells1, cones1);
    bool identity_equal = wa.verdicts.size() == wb.verdicts.size();
    for (auto& [key, va] : wa.verdicts) {
        auto it = wb.verdicts.find(key);
        identity_equal = identity_equal && it != wb.verdicts.end() &&
                         it->second.regular == va.regular &&
                         it->second.slope == va.slope && it->second.N0 == va.N0;
    }
    nlohmann::json j = {{"cutoff_wf_empty", empty},
                        {"containment", inclusion_json(incl)},
                        {"identity_equal", identity_equal}};
    write_text(dir + "/microlocality.json", j.dump(2) + "\n");
    bool pass = empty && incl.pass && identity_equal;
    return finish(8, "microlocality of cone cutoffs", pass,
                  std::string("empty=") + (empty ? "true" : "false") + " containment=" +
                      (incl.pass ? "true" : "false") + " identity=" +
                      (identity_equal ? "true" : "false"),
                  t0, 90.0);
}

// ---------------------------------------------------------------- criterion 9

CriterionResult c9_noncharacteristic(const std::string& dir) {
    double t0 = now_s();
    EpsilonGrid grid(1, 6);

    GridSpec s2(2, 512);
    CellDecomposition cells2(s2, 8);
    ConeGrid cones2;
    cones2.n = 2;
    cones2.D = 16;
    cones2.min_radius = 8;
    auto uh = make_fixture("heaviside2d", s2, grid);
    auto xi1 = sym(ComplexExpr::real(evar(Var::Xi0)), 1, 2, "xi1_2d");
    NonCharReport r1 = verify_noncharacteristic(xi1, uh, cells2, cones2);

    GridSpec s1(1, 512);
    CellDecomposition cells1(s1, 8);
    ConeGrid cones1;
    cones1.n = 1;
    cones1.min_radius = 8;
    auto ud = make_fixture("delta", s1, grid);
    auto jb = sym(ComplexExpr::real(ejbracket({evar(Var::Xi0)})), 1, 1, "bracket_xi");
    NonCharReport r2 = verify_noncharacteristic(jb, ud, cells1, cones1);

    nlohmann::json j = {{"jump_forward", inclusion_json(r1.forward)},
                        {"jump_backward", inclusion_json(r1.backward)},
                        {"elliptic_forward", inclusion_json(r2.forward)},
                        {"elliptic_backward", inclusion_json(r2.backward)}};
    write_text(dir + "/noncharacteristic.json", j.dump(2) + "\n");
    bool pass = r1.pass && r2.pass;
    return finish(9, "noncharacteristic regularity inclusions", pass,
                  std::string("jump=") + (r1.pass ? "ok" : "fail") + " elliptic=" +
                      (r2.pass ? "ok" : "fail"),
                  t0, 90.0);
}

// --------------------------------------------------------------- criterion 10

std::set<int> singular_sectors(const WavefrontEstimate& wf) {
    std::set<int> out;
    for (auto& [c, d] : wf.singular_set()) out.insert(d);
    return out;
}

std::set<int> singular_cells(const VP& v) {
    std::set<int> out;
    for (auto& [c, d] : v) out.insert(c);
    return out;
}

bool cell_near(const std::set<int>& cells, int target, int C) {
    for (int c : cells) {
        int diff = std::abs(c - target);
        if (std::min(diff, C - diff) <= 1) return true;
    }
    return false;
}

CriterionResult c10_propagation(const std::string& dir) {
    double t0 = now_s();
    GridSpec spec(1, 512);
    EpsilonGrid grid(1, 6);
    CellDecomposition cells(spec, 8);
    ConeGrid cones;
    cones.n = 1;
    cones.min_radius = 8;
    auto g = make_fixture("delta", spec, grid);

    HamiltonianField fld{sym(ComplexExpr::real(evar(Var::Xi0)), 1, 1, "xi"), 1};
    CauchyProblemSpec cp{fld, std::nullopt, g, 1.0, 0.0, {0.5, 1.0}};
    PropagationReport rep = verify_propagation(cp, cells, cones);
    bool pass = rep.pass;
    std::string detail;
    auto wf_g = wavefront_estimate(g, cells, cones);
    std::set<int> base_sectors = singular_sectors(wf_g);
    for (auto& snap : rep.snapshots) {
        std::set<int> sc = singular_cells(snap.estimated), sd;
        for (auto& [c, d] : snap.estimated) sd.insert(d);
        if (!cell_near(sc, cell_of(kX0 + snap.t, 8), 8)) {
            pass = false;
            detail += " displaced_cell_missed@t=" + fd(snap.t);
        }
        if (sd != base_sectors) {
            pass = false;
            detail += " sectors_changed@t=" + fd(snap.t);
        }
    }

    HamiltonianField fldv{sym(ComplexExpr::real(emul(
                                  eadd(econst(1), emul(econst(0.5), esin(evar(Var::X0)))),
                                  evar(Var::Xi0))),
                              1, 1, "transport_speed"),
                          1};
    CauchyProblemSpec cpv{fldv, std::nullopt, g, 1.0, 0.0, {1.0}};
    PropagationReport repv = verify_propagation(cpv, cells, cones);
    if (!repv.pass) {
        pass = false;
        detail += " variable_speed_fail";
    }

    auto sols = solve_cauchy(cp);
    HamiltonianField fldr{sym(ComplexExpr::real(eneg(evar(Var::Xi0))), 1, 1, "neg_xi"), 1};
    CauchyProblemSpec cpr{fldr, std::nullopt, sols.back(), 1.0, 0.0, {1.0}};
    PropagationReport repr = verify_propagation(cpr, cells, cones);
    bool rev_ok = repr.pass;
    if (rev_ok && !repr.snapshots.empty()) {
        std::set<int> sc = singular_cells(repr.snapshots.back().estimated);
        rev_ok = cell_near(sc, cell_of(kX0, 8), 8);
    }
    if (!rev_ok) {
        pass = false;
        detail += " time_reversal_fail";
    }
    nlohmann::json j = {{"constant", propagation_json(rep)},
                        {"variable", propagation_json(repv)},
                        {"reversed", propagation_json(repr)}};
    write_text(dir + "/propagation.json", j.dump(2) + "\n");
    return finish(10, "singularity propagation along the flow", pass,
                  pass ? "constant+variable+reversal ok" : detail, t0, 180.0);
}

// --------------------------------------------------- criteria 11 -- 12 shared

struct SpaceTimeRun {
    GridSpec spec{2, 512};
    EpsilonGrid grid{1, 6};
    CellDecomposition cells;
    ConeGrid cones;
    WavefrontEstimate wf_transport;
    WavefrontEstimate wf_conormal;
};

SpaceTimeRun run_spacetime() {
    SpaceTimeRun st;
    st.cells = CellDecomposition(st.spec, 8);
    st.cones.n = 2;
    st.cones.D = 16;
    st.cones.min_radius = 8;
    auto ut = make_fixture("transport_sheet", st.spec, st.grid);
    st.wf_transport = wavefront_estimate(ut, st.cells, st.cones);
    auto uc = make_fixture("conormal_sheet", st.spec, st.grid);
    st.wf_conormal = wavefront_estimate(uc, st.cells, st.cones);
    return st;
}

CriterionResult c11_lift(const std::string& dir, const SpaceTimeRun& st) {
    double t0 = now_s();
    double res = 0;
    std::vector<LiftPoint> saved;
    for (int which = 0; which < 2; ++which) {
        SymbolFamily p1 =
            which == 0 ? sym(ComplexExpr::real(evar(Var::Xi0)), 1, 1, "xi")
                       : sym(ComplexExpr::real(emul(
                                 eadd(econst(1), emul(econst(0.5), esin(evar(Var::X0)))),
                                 evar(Var::Xi0))),
                             1, 1, "transport_speed");
        HamiltonianField fld{p1, 1};
        for (double xi0 : {1.0, -1.0}) {
            double x0[2] = {kX0, 0}, xid[2] = {xi0, 0};
            auto lift = bicharacteristic_lift(fld, x0, xid, 0.0, kTwoPi, 1e-3);
            for (auto& q : lift) {
                double xv[2] = {q.x[0], 0}, xiv[2] = {q.xi[0], 0};
                cplx pv = eval_symbol(p1, xv, xiv, 1.0, q.t);
                res = std::max(res, std::abs(q.tau + pv.real()));
            }
            if (which == 0 && xi0 > 0) saved = lift;
        }
    }
    write_text(dir + "/lift.csv", lift_csv(saved, 1));

    VP pred;
    for (int m = 0; m < 512; ++m) {
        double t = kTwoPi * m / 512;
        for (double xi0 : {1.0, -1.0}) {
            int cx = cell_of(kX0 + t, 8), ct = cell_of(t, 8);
            // covector along the lift is (xi, tau) = (xi0, -xi0); mark every
            // sector whose overlap span contains it, matching the estimator's
            // sector granularity
            for (int d = 0; d < st.cones.sector_count(); ++d)
                if (st.cones.contains(d, xi0, -xi0)) pred.push_back({cx * 8 + ct, d});
        }
    }
    std::sort(pred.begin(), pred.end());
    pred.erase(std::unique(pred.begin(), pred.end()), pred.end());
    VP left = st.wf_transport.singular_set();
    bool contained = !left.empty() && subset_of(left, dilate_cell_sector(pred, 8, 2, 16));
    nlohmann::json j = {{"tau_residual", res},
                        {"spacetime_contained", contained},
                        {"estimated_count", left.size()},
                        {"predicted_count", pred.size()}};
    write_text(dir + "/spacetime.json", j.dump(2) + "\n");
    bool pass = res <= 1e-8 && contained;
    return finish(11, "bicharacteristic lift and space-time wave front", pass,
                  "tau_residual=" + fd(res) + " contained=" +
                      (contained ? "true" : "false"),
                  t0, 120.0);
}

CriterionResult c12_restrict(const std::string& dir, const SpaceTimeRun& st) {
    double t0 = now_s();
    double t0_slice = st.cells.cell_center(4);
    VP predicted = wf_restrict_predict(st.wf_transport, st.cells, st.cones, t0_slice);

    GridSpec s1(1, 512);
    CellDecomposition cells1(s1, 8);
    ConeGrid cones1;
    cones1.n = 1;
    cones1.min_radius = 8;
    auto slice = delta_at(s1, st.grid, wrap2pi(kX0 + t0_slice));
    auto wf_direct = wavefront_estimate(slice, cells1, cones1);
    VP direct = wf_direct.singular_set();
    bool contained =
        !direct.empty() && subset_of(direct, dilate_cell_sector(predicted, 8, 1, 2));

    bool conormal_flagged = false;
    try {
        wf_restrict_predict(st.wf_conormal, st.cells, st.cones, kY0);
    } catch (const ConormalPresent&) {
        conormal_flagged = true;
    }
    nlohmann::json j = {{"t0", t0_slice},
                        {"predicted", nlohmann::json::array()},
                        {"direct", nlohmann::json::array()},
                        {"contained", contained},
                        {"conormal_flagged", conormal_flagged}};
    for (auto& [c, d] : predicted) j["predicted"].push_back({c, d});
    for (auto& [c, d] : direct) j["direct"].push_back({c, d});
    write_text(dir + "/restrict.json", j.dump(2) + "\n");
    bool pass = contained && conormal_flagged;
    return finish(12, "time-slice restriction of the space-time wave front", pass,
                  std::string("contained=") + (contained ? "true" : "false") +
                      " conormal_flagged=" + (conormal_flagged ? "true" : "false"),
                  t0, 120.0);
}

void write_manifest(const std::string& dir) {
    Thresholds th = default_thresholds();
    nlohmann::json j = {
        {"thresholds",
         {{"slow_slope", th.slow_slope},
          {"negligible_min_slope", th.negligible_min_slope},
          {"moderate_max_slope", th.moderate_max_slope},
          {"tau_dir", th.tau_dir},
          {"n_max", th.n_max},
          {"tail_fraction", th.tail_fraction}}},
        {"wavefront", {{"C", 8}, {"D", 16}, {"L", 8}}},
        {"grids",
         {{"classify_j", {1, 40}},
          {"ginf", {{"G", 512}, {"j", {1, 10}}, {"D_max", 6}}},
          {"calculus_G", 512},
          {"parametrix_G", 256},
          {"delta_wf",
           {{"G1", 256}, {"G2", 128}, {"j", {1, 8}}, {"min_radius_1d", "G/8"},
            {"min_radius_2d", 8}}},
          {"directional", {{"G", 256}, {"j", {1, 8}}, {"min_radius", "G/8"}}},
          {"operator_runs", {{"G", 512}, {"j", {1, 6}}, {"min_radius", 8}}}}},
        {"seeds", {{"inputs", 100}, {"parametrix", 7}}}};
    write_text(dir + "/manifest.json", j.dump(2) + "\n");
}

}  // namespace

SymbolFamily catalog_symbol(const std::string& label) {
    if (label == "xi") return sym(ComplexExpr::real(evar(Var::Xi0)), 1, 1, label);
    if (label == "x") return sym(ComplexExpr::real(evar(Var::X0)), 0, 1, label);
    if (label == "xxi")
        return sym(ComplexExpr::real(emul(evar(Var::X0), evar(Var::Xi0))), 1, 1, label);
    if (label == "bracket_xi")
        return sym(ComplexExpr::real(ejbracket({evar(Var::Xi0)})), 1, 1, label);
    if (label == "bracket_xi_2d")
        return sym(ComplexExpr::real(ejbracket({evar(Var::Xi0), evar(Var::Xi1)})), 1, 2,
                   label);
    if (label == "xi1_2d") return sym(ComplexExpr::real(evar(Var::Xi0)), 1, 2, label);
    if (label == "one") return sym(ComplexExpr::constant(1.0), 0, 1, label);
    if (label == "sin_x") return sym(ComplexExpr::real(esin(evar(Var::X0))), 0, 1, label);
    if (label == "one_plus_xi2")
        return sym(ComplexExpr::real(
                       eadd(econst(1), emul(evar(Var::Xi0), evar(Var::Xi0)))),
                   2, 1, label);
    if (label == "slow_coeff") return sym(lorentz_denominator(true), 0, 1, label);
    if (label == "fast_coeff") return sym(lorentz_denominator(false), 0, 1, label);
    if (label == "transport_speed")
        return sym(ComplexExpr::real(emul(
                       eadd(econst(1), emul(econst(0.5), esin(evar(Var::X0)))),
                       evar(Var::Xi0))),
                   1, 1, label);
    if (label == "cone_e2") return build_cone_cutoff({0.0, 1.0}, kPi / 8, kPi / 4, 2);
    throw ValidationError("unknown symbol label '" + label + "'");
}

std::vector<std::string> symbol_catalog_labels() {
    return {"xi",  "x",          "xxi",        "bracket_xi",      "bracket_xi_2d",
            "xi1_2d", "one",     "sin_x",      "one_plus_xi2",    "slow_coeff",
            "fast_coeff", "transport_speed",   "cone_e2"};
}

std::vector<CriterionResult> run_criteria(const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<CriterionResult> results;
    write_manifest(out_dir);
    auto guarded = [&](int id, const std::string& name, auto&& fn) {
        double t0 = now_s();
        try {
            results.push_back(fn());
        } catch (const std::exception& e) {
            results.push_back(finish(id, name, false,
                                     std::string("error: ") + e.what(), t0, 1e9));
        }
    };
    guarded(1, "scale classification catalog", [&] { return c1_classify(out_dir); });
    guarded(2, "G-infinity coefficient dichotomy", [&] { return c2_ginf(out_dir); });
    guarded(3, "composition and adjoint exactness", [&] { return c3_exactness(out_dir); });
    guarded(4, "remainder order drops per truncation step",
            [&] { return c4_truncation(out_dir); });
    guarded(5, "parametrix inverts above excision", [&] { return c5_parametrix(out_dir); });
    guarded(6, "point mass wave front", [&] { return c6_delta_wf(out_dir); });
    guarded(7, "directional resolution of a jump", [&] { return c7_directional(out_dir); });
    guarded(8, "micro-locality of cone cutoffs", [&] { return c8_microlocality(out_dir); });
    guarded(9, "noncharacteristic regularity", [&] { return c9_noncharacteristic(out_dir); });
    guarded(10, "singularity propagation along the flow",
            [&] { return c10_propagation(out_dir); });
    SpaceTimeRun st = run_spacetime();
    guarded(11, "bicharacteristic lift and space-time wave front",
            [&] { return c11_lift(out_dir, st); });
    guarded(12, "time-slice restriction of the space-time wave front",
            [&] { return c12_restrict(out_dir, st); });
    nlohmann::json summary = nlohmann::json::array();
    for (auto& r : results)
        summary.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass},
                           {"detail", r.detail}});
    write_text(out_dir + "/summary.json", summary.dump(2) + "\n");
    return results;
}

std::vector<CriterionResult> run_acceptance(const std::string& out_dir) {
    double t0 = now_s();
    auto results = run_criteria(out_dir + "/run1");
    run_criteria(out_dir + "/run2");
    bool identical = true;
    std::string diff;
    std::vector<fs::path> files;
    for (auto& e : fs::recursive_directory_iterator(out_dir + "/run1"))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (auto& f : files) {
        fs::path other = fs::path(out_dir + "/run2") / f.lexically_relative(out_dir + "/run1");
        if (!fs::exists(other) || read_text(f.string()) != read_text(other.string())) {
            identical = false;
            diff += " " + f.filename().string();
        }
    }
    CriterionResult r;
    r.id = 13;
    r.name = "determinism of the full bundle";
    r.pass = identical;
    r.detail = identical ? std::to_string(files.size()) + " files byte-identical"
                         : "differs:" + diff;
    r.seconds = now_s() - t0;
    results.push_back(r);
    return results;
}

}  // namespace mlg
