#include "mlg/hyperbolic.hpp"

#include <algorithm>
#include <set>

namespace mlg {

namespace {

double wrap_tau(double x) {
    double w = std::fmod(x, kTwoPi);
    if (w < 0) w += kTwoPi;
    return w;
}

struct FlowDerivs {
    ComplexExpr dxi[2];  // grad_xi P1
    ComplexExpr dx[2];   // grad_x P1

    explicit FlowDerivs(const SymbolFamily& P1) {
        dxi[0] = cdiff(P1.expr, Var::Xi0);
        dxi[1] = cdiff(P1.expr, Var::Xi1);
        dx[0] = cdiff(P1.expr, Var::X0);
        dx[1] = cdiff(P1.expr, Var::X1);
    }
};

void rhs(const FlowDerivs& fd, int n, double t, const double* x, const double* xi,
         double* dx_out, double* dxi_out) {
    EvalPoint p;
    p.x[0] = x[0];
    p.xi[0] = xi[0];
    if (n > 1) {
        p.x[1] = x[1];
        p.xi[1] = xi[1];
    }
    p.t = t;
    for (int i = 0; i < n; ++i) {
        dx_out[i] = fd.dxi[i](p).real();
        dxi_out[i] = -fd.dx[i](p).real();
    }
    for (int i = n; i < 2; ++i) {
        dx_out[i] = 0;
        dxi_out[i] = 0;
    }
}

FlowState integrate(const FlowDerivs& fd, int n, FlowState s, double t, double dt) {
    int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt - 1e-12)));
    double h = t / steps;
    double k1x[2], k1xi[2], k2x[2], k2xi[2], k3x[2], k3xi[2], k4x[2], k4xi[2];
    double tx[2], txi[2];
    for (int sstep = 0; sstep < steps; ++sstep) {
        double tc = s.t;
        rhs(fd, n, tc, s.x, s.xi, k1x, k1xi);
        for (int i = 0; i < 2; ++i) {
            tx[i] = s.x[i] + 0.5 * h * k1x[i];
            txi[i] = s.xi[i] + 0.5 * h * k1xi[i];
        }
        rhs(fd, n, tc + 0.5 * h, tx, txi, k2x, k2xi);
        for (int i = 0; i < 2; ++i) {
            tx[i] = s.x[i] + 0.5 * h * k2x[i];
            txi[i] = s.xi[i] + 0.5 * h * k2xi[i];
        }
        rhs(fd, n, tc + 0.5 * h, tx, txi, k3x, k3xi);
        for (int i = 0; i < 2; ++i) {
            tx[i] = s.x[i] + h * k3x[i];
            txi[i] = s.xi[i] + h * k3xi[i];
        }
        rhs(fd, n, tc + h, tx, txi, k4x, k4xi);
        for (int i = 0; i < 2; ++i) {
            s.x[i] += h / 6 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
            s.xi[i] += h / 6 * (k1xi[i] + 2 * k2xi[i] + 2 * k3xi[i] + k4xi[i]);
        }
        s.t = tc + h;
    }
    return s;
}

}  // namespace

void HamiltonianField::validate() const {
    // Realness on a lattice.
    EvalPoint p;
    for (int ix = 0; ix < 5; ++ix) {
        for (int id = 0; id < 8; ++id) {
            for (double r : {1.0, 4.0, 16.0}) {
                p.x[0] = kTwoPi * ix / 5;
                p.x[1] = kTwoPi * ((ix * 3) % 5) / 5;
                double th = n == 1 ? 0.0 : kTwoPi * id / 8;
                p.xi[0] = n == 1 ? (id % 2 ? -r : r) : r * std::cos(th);
                p.xi[1] = n == 1 ? 0.0 : r * std::sin(th);
                cplx v = P1.expr(p);
                if (std::abs(v.imag()) > 1e-12)
                    throw ValidationError("principal symbol must be real-valued");
                for (double lam : {2.0, 4.0}) {
                    EvalPoint q = p;
                    q.xi[0] *= lam;
                    q.xi[1] *= lam;
                    double err = std::abs(P1.expr(q).real() - lam * v.real());
                    if (err > 1e-8 * lam * r)
                        throw ValidationError("principal symbol not homogeneous of degree 1");
                }
            }
        }
    }
}

FlowState hamilton_flow(const HamiltonianField& field, const FlowState& s0, double t,
                        double dt) {
    if (!(dt > 0)) throw ValidationError("need dt > 0");
    if (std::abs(t) / dt > 1e7) throw ValidationError("too many flow steps");
    FlowDerivs fd(field.P1);
    if (t == 0) return s0;
    FlowState full = integrate(fd, field.n, s0, t, dt);
    FlowState half = integrate(fd, field.n, s0, t, dt / 2);
    double num = 0, den = 1e-30;
    for (int i = 0; i < 2; ++i) {
        num += std::abs(full.x[i] - half.x[i]) + std::abs(full.xi[i] - half.xi[i]);
        den += std::abs(half.x[i]) + std::abs(half.xi[i]);
    }
    if (num / den > 1e-6) throw StepTooLarge("flow richardson estimate above 1e-6");
    half.x[0] = wrap_tau(half.x[0]);
    half.x[1] = wrap_tau(half.x[1]);
    return half;
}

std::vector<LiftPoint> bicharacteristic_lift(const HamiltonianField& field,
                                             const double* x0, const double* xi0,
                                             double t_begin, double t_end, double dt) {
    if (xi0[0] == 0 && xi0[1] == 0) throw ValidationError("xi0 must be nonzero");
    if (!(dt > 0) || t_end < t_begin) throw ValidationError("bad time range");
    FlowDerivs fd(field.P1);
    int steps = std::max(1, static_cast<int>(std::round((t_end - t_begin) / dt)));
    std::vector<LiftPoint> curve;
    FlowState s;
    s.x[0] = x0[0];
    s.x[1] = field.n > 1 ? x0[1] : 0.0;
    s.xi[0] = xi0[0];
    s.xi[1] = field.n > 1 ? xi0[1] : 0.0;
    s.t = t_begin;
    auto push = [&](const FlowState& st) {
        LiftPoint lp;
        lp.t = st.t;
        lp.x[0] = wrap_tau(st.x[0]);
        lp.x[1] = wrap_tau(st.x[1]);
        lp.xi[0] = st.xi[0];
        lp.xi[1] = st.xi[1];
        EvalPoint p;
        p.x[0] = st.x[0];
        p.x[1] = st.x[1];
        p.xi[0] = st.xi[0];
        p.xi[1] = st.xi[1];
        p.t = st.t;
        lp.tau = -field.P1.expr(p).real();
        curve.push_back(lp);
    };
    push(s);
    double h = (t_end - t_begin) / steps;
    for (int i = 0; i < steps; ++i) {
        s = integrate(fd, field.n, s, h, dt);
        push(s);
    }
    return curve;
}

TransportTable transport_symbol(const SymbolFamily& q, const HamiltonianField& field,
                                double t, const CellDecomposition& cells,
                                const ConeGrid& cones, const std::vector<double>& radii,
                                double dt, double eps) {
    if (q.order != 0.0) throw ValidationError("transported symbol must have order 0");
    TransportTable tab;
    tab.cells = cells.cell_count();
    tab.sectors = cones.sector_count();
    tab.shells = static_cast<int>(radii.size());
    tab.values.resize(static_cast<size_t>(tab.cells) * tab.sectors * tab.shells);
    FlowDerivs fd(field.P1);
    size_t w = 0;
    for (int c = 0; c < tab.cells; ++c) {
        for (int d = 0; d < tab.sectors; ++d) {
            double dir[2];
            cones.center_dir(d, dir);
            for (int s = 0; s < tab.shells; ++s) {
                FlowState st;
                st.x[0] = cells.cell_center(cells.cell_x(c));
                st.x[1] = cells.spec.n == 1 ? 0.0 : cells.cell_center(cells.cell_y(c));
                st.xi[0] = radii[s] * dir[0];
                st.xi[1] = cells.spec.n == 1 ? 0.0 : radii[s] * dir[1];
                st.t = t;
                if (t != 0.0) st = integrate(fd, field.n, st, -t, dt);
                double x[2] = {wrap_tau(st.x[0]), wrap_tau(st.x[1])};
                tab.values[w++] = eval_symbol(q, x, st.xi, eps, st.t);
            }
        }
    }
    return tab;
}

double cfl_bound(const HamiltonianField& field, const GridSpec& spec) {
    FlowDerivs fd(field.P1);
    double vmax = 1e-12;
    EvalPoint p;
    for (int ix = 0; ix < 16; ++ix) {
        p.x[0] = kTwoPi * ix / 16;
        for (int iy = 0; iy < (spec.n == 1 ? 1 : 16); ++iy) {
            p.x[1] = kTwoPi * iy / 16;
            for (int id = 0; id < (spec.n == 1 ? 2 : 16); ++id) {
                double th = kTwoPi * id / 16;
                p.xi[0] = spec.n == 1 ? (id == 0 ? 1.0 : -1.0) : std::cos(th);
                p.xi[1] = spec.n == 1 ? 0.0 : std::sin(th);
                p.xi[0] *= spec.G / 2.0;
                p.xi[1] *= spec.n == 1 ? 0.0 : spec.G / 2.0;
                for (double tt : {0.0, 0.5, 1.0}) {
                    p.t = tt;
                    double g = 0;
                    for (int i = 0; i < spec.n; ++i)
                        g = std::max(g, std::abs(fd.dxi[i](p).real()));
                    vmax = std::max(vmax, g);
                }
            }
        }
    }
    return 0.5 / (spec.G * vmax);
}

std::vector<GridFunctionFamily> solve_cauchy(const CauchyProblemSpec& spec) {
    spec.g.validate();
    spec.field.validate();
    const GridSpec& gs = spec.g.spec;
    long long N = gs.size();

    SymbolFamily P = spec.field.P1;
    if (spec.lower) {
        P.expr = P.expr + spec.lower->expr;
        if (spec.lower->dim != P.dim) throw ValidationError("lower-order part dim mismatch");
    }
    std::vector<double> times = spec.record_times;
    if (times.empty()) times.push_back(spec.T);

    std::vector<GridFunctionFamily> out(times.size());
    for (auto& o : out) {
        o.spec = gs;
        o.eps_grid = spec.g.eps_grid;
        o.data.assign(spec.g.data.size(), std::vector<cplx>(N));
    }

    bool const_coeff = P.x_independent() && !cdepends_on_any(P.expr, {Var::T});
    if (const_coeff) {
        // Exact multiplier stepping u_hat(t) = e^{-i t P(k)} u_hat(0).
        for (size_t ei = 0; ei < spec.g.data.size(); ++ei) {
            double eps = spec.g.eps_grid.eps(static_cast<int>(ei));
            std::vector<cplx> hat, res(N);
            fft_forward(gs, spec.g.data[ei], hat);
            EvalPoint p;
            p.eps = eps;
            for (size_t ti = 0; ti < times.size(); ++ti) {
                std::vector<cplx> shat(N);
                for (long long k = 0; k < N; ++k) {
                    if (gs.n == 1) {
                        p.xi[0] = gs.freq(static_cast<int>(k));
                    } else {
                        p.xi[0] = gs.freq(static_cast<int>(k / gs.G));
                        p.xi[1] = gs.freq(static_cast<int>(k % gs.G));
                    }
                    cplx pv = P.expr(p);
                    shat[k] = hat[k] * std::exp(cplx{0, -1} * times[ti] * pv);
                }
                fft_inverse(gs, shat, out[ti].data[ei]);
            }
        }
        for (size_t ti = 0; ti < times.size(); ++ti)
            out[ti].label = "cauchy_t" + std::to_string(times[ti]);
        return out;
    }

    double bound = cfl_bound(spec.field, gs);
    double dt = spec.dt > 0 ? spec.dt : bound;
    if (dt > bound * (1 + 1e-12)) throw StepTooLarge("dt above the CFL bound");

    double tmax = 0;
    for (double t : times) tmax = std::max(tmax, std::abs(t));
    for (double t : times)
        if (t < 0) throw ValidationError("method-of-lines path needs t >= 0");

    for (size_t ei = 0; ei < spec.g.data.size(); ++ei) {
        double eps = spec.g.eps_grid.eps(static_cast<int>(ei));
        double norm0 = 0;
        for (auto& v : spec.g.data[ei]) norm0 = std::max(norm0, std::abs(v));
        std::vector<cplx> u = spec.g.data[ei];
        std::vector<cplx> k1, k2, k3, k4, tmp(N);
        double tcur = 0;
        std::vector<size_t> order(times.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return times[a] < times[b]; });
        auto deriv = [&](double tt, const std::vector<cplx>& v, std::vector<cplx>& dv) {
            SymbolFamily Pt = P;
            Pt.expr = csubst(P.expr, {{Var::T, econst(tt)}});
            apply_symbol(Pt, gs, eps, v, dv);
            for (auto& z : dv) z *= cplx{0, -1};
        };
        for (size_t oi : order) {
            double tgt = times[oi];
            while (tcur < tgt - 1e-12) {
                double h = std::min(dt, tgt - tcur);
                deriv(tcur, u, k1);
                for (long long m = 0; m < N; ++m) tmp[m] = u[m] + 0.5 * h * k1[m];
                deriv(tcur + 0.5 * h, tmp, k2);
                for (long long m = 0; m < N; ++m) tmp[m] = u[m] + 0.5 * h * k2[m];
                deriv(tcur + 0.5 * h, tmp, k3);
                for (long long m = 0; m < N; ++m) tmp[m] = u[m] + h * k3[m];
                deriv(tcur + h, tmp, k4);
                for (long long m = 0; m < N; ++m)
                    u[m] += h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
                tcur += h;
                double nmax = 0;
                for (auto& v : u) nmax = std::max(nmax, std::abs(v));
                if (nmax > 1e6 * (norm0 + 1e-300))
                    throw Instability("solution norm exploded; CFL violated");
            }
            out[oi].data[ei] = u;
        }
    }
    for (size_t ti = 0; ti < times.size(); ++ti)
        out[ti].label = "cauchy_t" + std::to_string(times[ti]);
    return out;
}

PropagationReport verify_propagation(const CauchyProblemSpec& spec,
                                     const CellDecomposition& cells,
                                     const ConeGrid& cones, const WfConfig& cfg,
                                     double flow_dt) {
    std::vector<GridFunctionFamily> sols = solve_cauchy(spec);
    std::vector<double> times = spec.record_times;
    if (times.empty()) times.push_back(spec.T);

    WavefrontEstimate wf0 = wavefront_estimate(spec.g, cells, cones, cfg);
    auto sing0 = wf0.singular_set();
    double radius = spec.g.spec.G / 4.0;
    int C = cells.C;

    PropagationReport rep;
    rep.pass = true;
    for (size_t ti = 0; ti < times.size(); ++ti) {
        PropagationSnapshot snap;
        snap.t = times[ti];
        WavefrontEstimate wft = wavefront_estimate(sols[ti], cells, cones, cfg);
        snap.estimated = wft.singular_set();

        std::set<std::pair<int, int>> pred;
        for (auto& [c, d] : sing0) {
            FlowState s;
            s.x[0] = cells.cell_center(cells.cell_x(c));
            s.x[1] = cells.spec.n == 1 ? 0.0 : cells.cell_center(cells.cell_y(c));
            double dir[2];
            cones.center_dir(d, dir);
            s.xi[0] = radius * dir[0];
            s.xi[1] = cells.spec.n == 1 ? 0.0 : radius * dir[1];
            FlowState e = times[ti] == 0.0 ? s
                                           : hamilton_flow(spec.field, s, times[ti],
                                                           flow_dt);
            double h = cells.cell_width();
            int cx = static_cast<int>(std::floor(wrap_tau(e.x[0]) / h)) % C;
            int cell = cx;
            if (cells.spec.n == 2) {
                int cy = static_cast<int>(std::floor(wrap_tau(e.x[1]) / h)) % C;
                cell = cx * C + cy;
            }
            int sec;
            if (cones.n == 1) {
                sec = e.xi[0] > 0 ? 0 : 1;
            } else {
                double th = std::atan2(e.xi[1], e.xi[0]);
                sec = static_cast<int>(std::lround(th / (kTwoPi / cones.D)));
                sec = ((sec % cones.D) + cones.D) % cones.D;
            }
            pred.insert({cell, sec});
        }
        snap.predicted.assign(pred.begin(), pred.end());

        auto dil_pred =
            dilate_cell_sector(snap.predicted, C, cells.spec.n, cones.sector_count());
        auto dil_est =
            dilate_cell_sector(snap.estimated, C, cells.spec.n, cones.sector_count());
        snap.pass = subset_of(snap.estimated, dil_pred) &&
                    subset_of(snap.predicted, dil_est);
        rep.pass = rep.pass && snap.pass;
        rep.snapshots.push_back(std::move(snap));
    }
    return rep;
}

std::vector<std::pair<int, int>> wf_restrict_predict(const WavefrontEstimate& wf,
                                                     const CellDecomposition& cells,
                                                     const ConeGrid& cones, double t0) {
    if (cells.spec.n != 2 || cones.n != 2)
        throw ValidationError("restriction needs a 2d space-time estimate");
    int C = cells.C;
    double h = cells.cell_width();
    std::vector<int> t_rows;
    for (int cy = 0; cy < C; ++cy)
        if (cy * h <= t0 + 1e-12 && t0 <= (cy + 1) * h + 1e-12) t_rows.push_back(cy);

    auto sing = wf.singular_set();
    std::set<std::pair<int, int>> singset(sing.begin(), sing.end());

    // Conormal guard: a genuine pure-tau singularity lies in the overlap span
    // of every sector containing +-e_tau, so all of them must be flagged at
    // once; window leakage only hits the exact-center sector.
    for (double sgn : {1.0, -1.0}) {
        std::vector<int> tau_sectors;
        for (int d = 0; d < cones.sector_count(); ++d)
            if (cones.contains(d, 0.0, sgn)) tau_sectors.push_back(d);
        for (int cy : t_rows) {
            for (int cx = 0; cx < C; ++cx) {
                int cell = cx * C + cy;
                bool all = !tau_sectors.empty();
                for (int d : tau_sectors) all = all && singset.count({cell, d}) > 0;
                if (all)
                    throw ConormalPresent("pure-tau singular sector on the t0 slice");
            }
        }
    }

    std::set<std::pair<int, int>> out;
    for (int cy : t_rows) {
        for (int cx = 0; cx < C; ++cx) {
            int cell = cx * C + cy;
            for (int d = 0; d < cones.sector_count(); ++d) {
                if (!singset.count({cell, d})) continue;
                double cth = std::cos(cones.center_angle(d));
                if (cth > 1e-9)
                    out.insert({cx, 0});
                else if (cth < -1e-9)
                    out.insert({cx, 1});
            }
        }
    }
    return {out.begin(), out.end()};
}

}  // namespace mlg
