#include "mlg/wavefront.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <set>

namespace mlg {

namespace {

constexpr double kFloor = 1e-280;
constexpr double kRel = 1.0 / 256.0;       // 2^-8, per-cell relative floor
constexpr double kGRel = 1.0 / 1024.0;     // 2^-10, global relative floor
const double kSatRel = std::pow(2.0, -2.5);

double polyfit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    return fit_line(xs, ys).slope;
}

enum class FitStatus { Ok, Saturated, Degenerate };

// Per-(sector, l) fit of the eps-growth exponent from the floored maxima row.
std::pair<double, FitStatus> fit_l_row(const std::vector<double>& M,
                                       const std::vector<double>& A,
                                       const std::vector<double>& Rel,
                                       const std::vector<double>& js, double kmin,
                                       double kmax) {
    int n = static_cast<int>(js.size());
    std::vector<double> y(n);
    std::vector<bool> valid(n);
    for (int i = 0; i < n; ++i) {
        y[i] = std::log2(std::max(M[i], kFloor));
        valid[i] = M[i] > 1e-100;
    }
    auto grow = [&](int ji) {
        return valid[ji - 1] && valid[ji] && (y[ji] - y[ji - 1]) >= 0.75;
    };

    // Longest consecutive run of growth steps whose argmax radius walks outward.
    std::vector<int> best, run;
    for (int ji = 1; ji < n; ++ji) {
        if (!(1.25 * kmin < A[ji] && A[ji] < 0.8 * kmax && grow(ji))) continue;
        double ratio = A[ji] / std::max(A[run.empty() ? ji : run.back()], 1e-30);
        if (!run.empty() && ji == run.back() + 1 && 1.3 <= ratio && ratio <= 3.1)
            run.push_back(ji);
        else
            run = {ji};
        if (run.size() > best.size()) best = run;
    }
    int jstop = n;
    for (int ji = 0; ji < n; ++ji)
        if (valid[ji] && A[ji] >= 0.8 * kmax) {
            jstop = ji;
            break;
        }
    if (static_cast<int>(best.size()) >= 2 && best.back() >= jstop - 2) {
        std::vector<double> xs, ys;
        for (int b : best) {
            xs.push_back(js[b]);
            ys.push_back(y[b]);
        }
        return {polyfit_slope(xs, ys), FitStatus::Ok};
    }

    double ymax = *std::max_element(y.begin(), y.end());
    bool grow_at_edge = false;
    for (int ji = 1; ji < n; ++ji)
        if (grow(ji) && A[ji] >= 0.8 * kmax) grow_at_edge = true;
    if (valid[n - 1] && y[n - 1] >= ymax - 1.0 && Rel[n - 1] >= kSatRel && grow_at_edge)
        return {0.0, FitStatus::Saturated};

    std::vector<int> V;
    for (int i = 0; i < n; ++i)
        if (valid[i]) V.push_back(i);
    if (static_cast<int>(V.size()) < 2) return {0.0, FitStatus::Degenerate};
    std::vector<double> xs, ys;
    size_t start = V.size() >= 3 ? V.size() - 3 : 0;
    for (size_t i = start; i < V.size(); ++i) {
        xs.push_back(js[V[i]]);
        ys.push_back(y[V[i]]);
    }
    double ts = polyfit_slope(xs, ys);
    if (ts <= 0.15) return {ts, FitStatus::Ok};
    xs.clear();
    ys.clear();
    for (int v : V) {
        xs.push_back(js[v]);
        ys.push_back(y[v]);
    }
    double af = polyfit_slope(xs, ys);
    if (af <= 0.15) return {af, FitStatus::Ok};
    return {0.0, FitStatus::Degenerate};
}

}  // namespace

double CellDecomposition::window_axis(int c, double x) const {
    double h = cell_width();
    auto win0 = [&](double xx) {
        double lo = eval_smoothstep((xx - (c * h - h / 2)) / (h / 2));
        double hi = eval_smoothstep((((c + 1) * h + h / 2) - xx) / (h / 2));
        return lo * hi;
    };
    return win0(x) + win0(x + kTwoPi) + win0(x - kTwoPi);
}

DirectionalDecayTable decay_table(const GridFunctionFamily& u,
                                  const CellDecomposition& cells, const ConeGrid& cones,
                                  int L) {
    u.validate();
    const GridSpec& spec = u.spec;
    if (cells.spec.n != spec.n || cells.spec.G != spec.G)
        throw ValidationError("decomposition/grid mismatch");
    if (cones.n != spec.n) throw ValidationError("cone/grid dimension mismatch");

    DirectionalDecayTable t;
    t.spec = spec;
    t.eps_grid = u.eps_grid;
    t.C = cells.C;
    t.L = L;
    t.nsec = cones.sector_count();
    t.kmin = cones.min_radius;
    t.kmax = spec.G / 2.0;

    long long N = spec.size();
    int ne = t.ne();
    int nc = cells.cell_count();

    // Per-frequency precomputation: radius, bracket, ball flag, sector bits.
    std::vector<double> KR(N), BR(N);
    std::vector<uint32_t> secbits(N, 0);
    std::vector<bool> ball(N);
    for (long long idx = 0; idx < N; ++idx) {
        double k0, k1 = 0;
        if (spec.n == 1) {
            k0 = spec.freq(static_cast<int>(idx));
        } else {
            k0 = spec.freq(static_cast<int>(idx / spec.G));
            k1 = spec.freq(static_cast<int>(idx % spec.G));
        }
        double r = std::sqrt(k0 * k0 + k1 * k1);
        KR[idx] = r;
        BR[idx] = std::sqrt(1.0 + r * r);
        ball[idx] = r >= t.kmin && r <= t.kmax;
        if (!ball[idx]) continue;
        if (spec.n == 1) {
            if (k0 > 0) secbits[idx] |= 1u;
            if (k0 < 0) secbits[idx] |= 2u;
        } else {
            double th = std::atan2(k1, k0);
            for (int d = 0; d < t.nsec; ++d) {
                double diff = std::remainder(th - kTwoPi * d / t.nsec, kTwoPi);
                if (std::abs(diff) <= kTwoPi / t.nsec) secbits[idx] |= (1u << d);
            }
        }
    }

    t.M.assign(nc, std::vector<double>(t.nsec * (L + 1) * ne, 0.0));
    t.A.assign(nc, std::vector<double>(t.nsec * (L + 1) * ne, 0.0));
    t.gmax.assign(nc, std::vector<double>((L + 1) * ne, 0.0));
    t.glob.assign((L + 1) * ne, 0.0);

    std::vector<double> window(N);
    std::vector<cplx> wu(N), hat(N);
    for (int c = 0; c < nc; ++c) {
        int cx = cells.cell_x(c), cy = cells.cell_y(c);
        for (long long m = 0; m < N; ++m) {
            if (spec.n == 1) {
                window[m] = cells.window_axis(cx, spec.point(static_cast<int>(m)));
            } else {
                window[m] =
                    cells.window_axis(cx, spec.point(static_cast<int>(m / spec.G))) *
                    cells.window_axis(cy, spec.point(static_cast<int>(m % spec.G)));
            }
        }
        for (int ji = 0; ji < ne; ++ji) {
            for (long long m = 0; m < N; ++m) wu[m] = window[m] * u.data[ji][m];
            fft_forward(spec, wu, hat);
            for (long long idx = 0; idx < N; ++idx) {
                if (!ball[idx]) continue;
                double av = std::abs(hat[idx]);
                double val = av;
                uint32_t bits = secbits[idx];
                for (int l = 0; l <= L; ++l) {
                    double& g = t.gmax[c][t.gidx(l, ji)];
                    if (val > g) g = val;
                    uint32_t b = bits;
                    while (b) {
                        int d = __builtin_ctz(b);
                        b &= b - 1;
                        double& Mv = t.M[c][t.idx(d, l, ji)];
                        if (val > Mv) {
                            Mv = val;
                            t.A[c][t.idx(d, l, ji)] = KR[idx];
                        }
                    }
                    val *= BR[idx];
                }
            }
        }
        for (int l = 0; l <= L; ++l)
            for (int ji = 0; ji < ne; ++ji)
                t.glob[t.gidx(l, ji)] =
                    std::max(t.glob[t.gidx(l, ji)], t.gmax[c][t.gidx(l, ji)]);
    }
    return t;
}

RegularityVerdict direction_verdict(const DirectionalDecayTable& t, int cell, int sector,
                                    double tau_dir, double n_max) {
    int ne = t.ne();
    std::vector<double> js(ne);
    for (int i = 0; i < ne; ++i) js[i] = t.eps_grid.j(i);

    std::map<int, double> N;
    bool sat = false;
    for (int l = 0; l <= t.L; ++l) {
        std::vector<double> M(ne), A(ne), Rel(ne);
        for (int ji = 0; ji < ne; ++ji) {
            double raw = t.M[cell][t.idx(sector, l, ji)];
            double g = t.gmax[cell][t.gidx(l, ji)];
            double flo = std::max(kRel * g, kGRel * t.glob[t.gidx(l, ji)]);
            M[ji] = raw >= flo ? raw : kFloor;
            A[ji] = t.A[cell][t.idx(sector, l, ji)];
            Rel[ji] = raw / std::max(g, 1e-299);
        }
        auto [slope, st] = fit_l_row(M, A, Rel, js, t.kmin, t.kmax);
        if (st == FitStatus::Ok)
            N[l] = slope;
        else if (st == FitStatus::Saturated)
            sat = true;
    }

    RegularityVerdict v;
    v.saturated = sat;
    v.fitted_count = static_cast<int>(N.size());
    if (sat && N.size() < 2) {
        v.regular = false;
        v.slope = std::numeric_limits<double>::infinity();
        return v;
    }
    if (N.size() < 4 && !sat) {
        v.regular = true;
        v.slope = 0.0;
        return v;
    }
    std::vector<double> ls, ns;
    for (auto& [l, nv] : N) {
        ls.push_back(l);
        ns.push_back(nv);
    }
    double sl = polyfit_slope(ls, ns);
    double nmaxv = *std::max_element(ns.begin(), ns.end());
    v.N0 = N.count(0) ? N[0] : 0.0;
    // Decaying content: every fitted N(l) at or below threshold means nothing
    // singular lives here even if the decay rate drifts with l.
    if (sl > tau_dir && nmaxv <= tau_dir) sl = 0.0;
    v.slope = sl;
    v.regular = !sat && sl <= tau_dir && v.N0 <= n_max;
    return v;
}

WavefrontEstimate wavefront_estimate(const GridFunctionFamily& u,
                                     const CellDecomposition& cells,
                                     const ConeGrid& cones, const WfConfig& cfg) {
    DirectionalDecayTable t = decay_table(u, cells, cones, cfg.L);
    WavefrontEstimate est;
    est.C = cells.C;
    est.nsec = t.nsec;
    est.n = u.spec.n;
    for (int c = 0; c < cells.cell_count(); ++c)
        for (int d = 0; d < t.nsec; ++d)
            est.verdicts[{c, d}] = direction_verdict(t, c, d, cfg.tau_dir, cfg.n_max);
    return est;
}

std::vector<int> singsupp_estimate(const GridFunctionFamily& u,
                                   const CellDecomposition& cells, const ConeGrid& cones,
                                   const WfConfig& cfg) {
    WavefrontEstimate est = wavefront_estimate(u, cells, cones, cfg);
    std::set<int> cellset;
    for (auto& [k, v] : est.verdicts)
        if (!v.regular) cellset.insert(k.first);
    return {cellset.begin(), cellset.end()};
}

GinfReport ginf_verdict(const GridFunctionFamily& u, int D_max) {
    u.validate();
    const GridSpec& spec = u.spec;
    long long N = spec.size();
    int ne = u.eps_grid.count();

    std::vector<std::array<int, 2>> alphas;
    if (spec.n == 1) {
        for (int a = 0; a <= D_max; ++a) alphas.push_back({a, 0});
    } else {
        for (int a = 0; a <= D_max; ++a)
            for (int b = 0; a + b <= D_max; ++b) alphas.push_back({a, b});
    }

    // Forward transforms once per eps.
    std::vector<std::vector<cplx>> hats(ne);
    for (int i = 0; i < ne; ++i) fft_forward(spec, u.data[i], hats[i]);

    GinfReport rep;
    std::vector<cplx> dh(N), dx(N);
    bool all_moderate = true;
    for (auto& al : alphas) {
        std::vector<double> vals(ne);
        for (int i = 0; i < ne; ++i) {
            for (long long idx = 0; idx < N; ++idx) {
                double k0, k1 = 0;
                if (spec.n == 1) {
                    k0 = spec.freq(static_cast<int>(idx));
                } else {
                    k0 = spec.freq(static_cast<int>(idx / spec.G));
                    k1 = spec.freq(static_cast<int>(idx % spec.G));
                }
                cplx mult{1, 0};
                for (int r = 0; r < al[0]; ++r) mult *= cplx{0, k0};
                for (int r = 0; r < al[1]; ++r) mult *= cplx{0, k1};
                dh[idx] = hats[i][idx] * mult;
            }
            fft_inverse(spec, dh, dx);
            double m = 0;
            for (auto& v : dx) m = std::max(m, std::abs(v));
            vals[i] = m;
        }
        NetSample net = make_net(u.eps_grid, vals);
        double slope;
        if (net.all_floored()) {
            slope = -std::numeric_limits<double>::infinity();
        } else {
            ScaleClass c = classify_scale(net);
            if (c.tag == ScaleTag::Unbounded) all_moderate = false;
            slope = c.fit.slope;
        }
        rep.exponents.push_back(slope);
    }
    double n0 = rep.exponents[0];
    double worst = n0;
    for (double s : rep.exponents) worst = std::max(worst, s);
    rep.spread = std::isfinite(n0) ? worst - n0 : 0.0;
    rep.verdict = all_moderate && rep.spread <= 0.75;
    return rep;
}

std::vector<std::pair<int, int>> dilate_cell_sector(
    const std::vector<std::pair<int, int>>& s, int C, int n, int nsec) {
    std::set<std::pair<int, int>> out;
    for (auto& [c, d] : s) {
        std::vector<int> cells_near;
        if (n == 1) {
            for (int dc = -1; dc <= 1; ++dc) cells_near.push_back(((c + dc) % C + C) % C);
        } else {
            int cx = c / C, cy = c % C;
            for (int dx = -1; dx <= 1; ++dx)
                for (int dy = -1; dy <= 1; ++dy)
                    cells_near.push_back((((cx + dx) % C + C) % C) * C +
                                         (((cy + dy) % C + C) % C));
        }
        std::vector<int> secs_near;
        if (n == 1) {
            secs_near.push_back(d);
        } else {
            for (int dd = -1; dd <= 1; ++dd)
                secs_near.push_back(((d + dd) % nsec + nsec) % nsec);
        }
        for (int cc : cells_near)
            for (int dd : secs_near) out.insert({cc, dd});
    }
    return {out.begin(), out.end()};
}

bool subset_of(const std::vector<std::pair<int, int>>& small,
               const std::vector<std::pair<int, int>>& big) {
    std::set<std::pair<int, int>> b(big.begin(), big.end());
    for (auto& p : small)
        if (!b.count(p)) return false;
    return true;
}

std::vector<SamplingBox> cell_boxes(const CellDecomposition& cells) {
    std::vector<SamplingBox> boxes;
    double hw = cells.cell_width() / 2;
    for (int c = 0; c < cells.cell_count(); ++c) {
        SamplingBox b;
        b.center[0] = cells.cell_center(cells.cell_x(c));
        b.center[1] = cells.spec.n == 1 ? 0.0 : cells.cell_center(cells.cell_y(c));
        b.half_widths[0] = hw;
        b.half_widths[1] = cells.spec.n == 1 ? 1.0 : hw;
        b.points_per_axis = 2;
        boxes.push_back(b);
    }
    return boxes;
}

InclusionReport verify_microlocality(const SymbolFamily& a, const GridFunctionFamily& u,
                                     const CellDecomposition& cells,
                                     const ConeGrid& cones, const WfConfig& cfg) {
    GridFunctionFamily au = quantize_kn(a, u);
    WavefrontEstimate wf_out = wavefront_estimate(au, cells, cones, cfg);
    WavefrontEstimate wf_in = wavefront_estimate(u, cells, cones, cfg);

    // Right-hand side: WF(u) intersected with the non-smoothing cone cells of a
    // (trimmed microsupport: first-order derivatives, two weights).
    MicrosupportEstimate ms =
        microsupport_estimate(a, cell_boxes(cells), cones, u.eps_grid, {-2, 0}, 1);
    std::set<std::pair<int, int>> not_smoothing;
    for (auto& c : ms.cells)
        if (!c.smoothing) not_smoothing.insert({c.box_id, c.sector_id});

    InclusionReport rep;
    rep.left = wf_out.singular_set();
    for (auto& p : wf_in.singular_set())
        if (not_smoothing.count(p)) rep.right.push_back(p);
    auto dil = dilate_cell_sector(rep.right, cells.C, u.spec.n, cones.sector_count());
    std::set<std::pair<int, int>> dset(dil.begin(), dil.end());
    rep.pass = true;
    for (auto& p : rep.left)
        if (!dset.count(p)) {
            rep.pass = false;
            rep.violations.push_back(p);
        }
    return rep;
}

NonCharReport verify_noncharacteristic(const SymbolFamily& a, const GridFunctionFamily& u,
                                       const CellDecomposition& cells,
                                       const ConeGrid& cones, const WfConfig& cfg) {
    GridFunctionFamily pu = quantize_kn(a, u);
    WavefrontEstimate wf_u = wavefront_estimate(u, cells, cones, cfg);
    WavefrontEstimate wf_pu = wavefront_estimate(pu, cells, cones, cfg);
    auto chars = characteristic_set(a, cell_boxes(cells), cones, u.eps_grid);

    NonCharReport rep;
    rep.forward.left = wf_pu.singular_set();
    rep.forward.right = wf_u.singular_set();
    rep.backward.left = wf_u.singular_set();
    rep.backward.right = wf_pu.singular_set();
    for (auto& p : chars) rep.backward.right.push_back(p);
    std::sort(rep.backward.right.begin(), rep.backward.right.end());
    rep.backward.right.erase(
        std::unique(rep.backward.right.begin(), rep.backward.right.end()),
        rep.backward.right.end());

    for (InclusionReport* r : {&rep.forward, &rep.backward}) {
        auto dil = dilate_cell_sector(r->right, cells.C, u.spec.n, cones.sector_count());
        std::set<std::pair<int, int>> dset(dil.begin(), dil.end());
        r->pass = true;
        for (auto& p : r->left)
            if (!dset.count(p)) {
                r->pass = false;
                r->violations.push_back(p);
            }
    }
    rep.pass = rep.forward.pass && rep.backward.pass;
    return rep;
}

}  // namespace mlg
