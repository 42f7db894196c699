#include "mlg/quantize.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>

namespace mlg {

namespace {

// In-place transform through a cached fftw_malloc'd buffer: alignment (and
// therefore FFTW's plan choice) is then identical on every call, which keeps
// results bitwise reproducible.
void fft_run(const GridSpec& spec, const std::vector<cplx>& in, std::vector<cplx>& out,
             int sign) {
    static thread_local fftw_complex* buf = nullptr;
    static thread_local size_t buf_size = 0;
    size_t n = in.size();
    if (n > buf_size) {
        if (buf) fftw_free(buf);
        buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        buf_size = n;
    }
    std::copy(in.begin(), in.end(), reinterpret_cast<cplx*>(buf));
    fftw_plan p = spec.n == 1
                      ? fftw_plan_dft_1d(spec.G, buf, buf, sign, FFTW_ESTIMATE)
                      : fftw_plan_dft_2d(spec.G, spec.G, buf, buf, sign, FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
    out.resize(n);
    std::copy(reinterpret_cast<cplx*>(buf), reinterpret_cast<cplx*>(buf) + n, out.begin());
}

}  // namespace

void fft_forward(const GridSpec& spec, const std::vector<cplx>& in, std::vector<cplx>& out) {
    fft_run(spec, in, out, FFTW_FORWARD);
}

void fft_inverse(const GridSpec& spec, const std::vector<cplx>& in, std::vector<cplx>& out) {
    fft_run(spec, in, out, FFTW_BACKWARD);
    double norm = 1.0 / static_cast<double>(spec.size());
    for (auto& v : out) v *= norm;
}

namespace {

// Separation of a real tree into sum_t f_t(x, eps) * g_t(xi, eps).
using SepTerm = std::pair<ExprPtr, ExprPtr>;
constexpr size_t kMaxSepTerms = 64;

bool has_xi(const ExprPtr& e) { return depends_on_any(e, {Var::Xi0, Var::Xi1}); }
bool has_x(const ExprPtr& e) { return depends_on_any(e, {Var::X0, Var::X1}); }

std::optional<std::vector<SepTerm>> separate(const ExprPtr& e) {
    if (!has_xi(e)) return std::vector<SepTerm>{{e, econst(1)}};
    if (!has_x(e)) return std::vector<SepTerm>{{econst(1), e}};
    switch (e->kind) {
        case NodeKind::Add:
        case NodeKind::Sub: {
            auto l = separate(e->kids[0]);
            auto r = separate(e->kids[1]);
            if (!l || !r) return std::nullopt;
            for (auto& t : *r) {
                if (e->kind == NodeKind::Sub) t.first = eneg(t.first);
                l->push_back(t);
            }
            if (l->size() > kMaxSepTerms) return std::nullopt;
            return l;
        }
        case NodeKind::Mul: {
            auto l = separate(e->kids[0]);
            auto r = separate(e->kids[1]);
            if (!l || !r) return std::nullopt;
            std::vector<SepTerm> out;
            for (auto& a : *l)
                for (auto& b : *r)
                    out.push_back({emul(a.first, b.first), emul(a.second, b.second)});
            if (out.size() > kMaxSepTerms) return std::nullopt;
            return out;
        }
        case NodeKind::Div: {
            auto l = separate(e->kids[0]);
            if (!l) return std::nullopt;
            const ExprPtr& den = e->kids[1];
            if (!has_xi(den)) {
                for (auto& t : *l) t.first = ediv(t.first, den);
                return l;
            }
            if (!has_x(den)) {
                for (auto& t : *l) t.second = ediv(t.second, den);
                return l;
            }
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

void fill_point(EvalPoint& p, const GridSpec& spec, long long m, double eps) {
    if (spec.n == 1) {
        p.x[0] = spec.point(static_cast<int>(m));
    } else {
        p.x[0] = spec.point(static_cast<int>(m / spec.G));
        p.x[1] = spec.point(static_cast<int>(m % spec.G));
    }
    p.eps = eps;
}

void fill_freq(EvalPoint& p, const GridSpec& spec, long long idx) {
    if (spec.n == 1) {
        p.xi[0] = spec.freq(static_cast<int>(idx));
    } else {
        p.xi[0] = spec.freq(static_cast<int>(idx / spec.G));
        p.xi[1] = spec.freq(static_cast<int>(idx % spec.G));
    }
}

void accumulate_separable(const std::vector<SepTerm>& terms, cplx unit,
                          const GridSpec& spec, double eps,
                          const std::vector<cplx>& uhat, std::vector<cplx>& out) {
    long long N = spec.size();
    std::vector<cplx> tmp_hat(N), tmp(N);
    EvalPoint p;
    p.eps = eps;
    for (auto& [f, g] : terms) {
        for (long long k = 0; k < N; ++k) {
            fill_freq(p, spec, k);
            tmp_hat[k] = uhat[k] * eval(g, p);
        }
        fft_inverse(spec, tmp_hat, tmp);
        for (long long m = 0; m < N; ++m) {
            fill_point(p, spec, m, eps);
            out[m] += unit * eval(f, p) * tmp[m];
        }
    }
}

}  // namespace

void apply_symbol(const SymbolFamily& a, const GridSpec& spec, double eps,
                  const std::vector<cplx>& in, std::vector<cplx>& out) {
    long long N = spec.size();
    if (static_cast<long long>(in.size()) != N)
        throw ValidationError("input size does not match grid");
    out.assign(N, cplx{0, 0});
    EvalPoint p;
    p.eps = eps;

    if (a.xi_independent()) {
        for (long long m = 0; m < N; ++m) {
            fill_point(p, spec, m, eps);
            out[m] = a.expr(p) * in[m];
        }
        return;
    }

    std::vector<cplx> uhat;
    fft_forward(spec, in, uhat);

    if (a.x_independent()) {
        for (long long k = 0; k < N; ++k) {
            fill_freq(p, spec, k);
            uhat[k] *= a.expr(p);
        }
        fft_inverse(spec, uhat, out);
        return;
    }

    auto re_terms = separate(a.expr.re);
    auto im_terms = separate(a.expr.im);
    if (re_terms && im_terms &&
        re_terms->size() + im_terms->size() <= kMaxSepTerms) {
        accumulate_separable(*re_terms, cplx{1, 0}, spec, eps, uhat, out);
        if (!is_zero_expr(a.expr.im))
            accumulate_separable(*im_terms, cplx{0, 1}, spec, eps, uhat, out);
        return;
    }

    double ops = std::pow(static_cast<double>(N), 2);
    if (ops > 4294967296.0)
        throw SeparabilityFallbackTooLarge("direct quantization sum over budget");
    double norm = 1.0 / static_cast<double>(N);
    for (long long m = 0; m < N; ++m) {
        fill_point(p, spec, m, eps);
        cplx acc{0, 0};
        for (long long k = 0; k < N; ++k) {
            fill_freq(p, spec, k);
            double phase = p.x[0] * p.xi[0] + (spec.n == 2 ? p.x[1] * p.xi[1] : 0.0);
            acc += std::polar(1.0, phase) * a.expr(p) * uhat[k];
        }
        out[m] = acc * norm;
    }
}

GridFunctionFamily quantize_kn(const SymbolFamily& a, const GridFunctionFamily& u) {
    if (a.dim != u.spec.n) throw ValidationError("symbol/grid dimension mismatch");
    u.validate();
    GridFunctionFamily out;
    out.spec = u.spec;
    out.eps_grid = u.eps_grid;
    out.label = u.label.empty() ? "op_output" : "op(" + u.label + ")";
    out.data.resize(u.data.size());
    for (size_t i = 0; i < u.data.size(); ++i)
        apply_symbol(a, u.spec, u.eps_grid.eps(static_cast<int>(i)), u.data[i],
                     out.data[i]);
    return out;
}

KernelMatrix kernel_matrix(const SymbolFamily& a, const GridSpec& spec,
                           const EpsilonGrid& grid) {
    if (spec.n == 2 && spec.G > 64) throw TooLarge("2d kernel limited to G <= 64");
    long long N = spec.size();
    KernelMatrix K;
    K.spec = spec;
    K.eps_grid = grid;
    K.mats.assign(grid.count(), std::vector<cplx>(N * N));
    double delta_scale = std::pow(spec.G / kTwoPi, spec.n);
    std::vector<cplx> e(N), col;
    for (int i = 0; i < grid.count(); ++i) {
        double eps = grid.eps(i);
        for (long long j = 0; j < N; ++j) {
            std::fill(e.begin(), e.end(), cplx{0, 0});
            e[j] = delta_scale;
            apply_symbol(a, spec, eps, e, col);
            for (long long r = 0; r < N; ++r) K.mats[i][r * N + j] = col[r];
        }
    }
    return K;
}

std::pair<KernelMatrix, KernelMatrix> split_proper_smoothing(const SymbolFamily& a,
                                                             const ComplexExpr& chi,
                                                             const GridSpec& spec,
                                                             const EpsilonGrid& grid) {
    KernelMatrix full = kernel_matrix(a, spec, grid);
    KernelMatrix proper = full, smoothing = full;
    long long N = spec.size();
    EvalPoint p;
    for (long long r = 0; r < N; ++r) {
        fill_point(p, spec, r, 1.0);
        for (long long c = 0; c < N; ++c) {
            if (spec.n == 1) {
                p.y[0] = spec.point(static_cast<int>(c));
            } else {
                p.y[0] = spec.point(static_cast<int>(c / spec.G));
                p.y[1] = spec.point(static_cast<int>(c % spec.G));
            }
            cplx w = chi(p);
            for (int i = 0; i < grid.count(); ++i) {
                cplx k = full.mats[i][r * N + c];
                proper.mats[i][r * N + c] = k * w;
                smoothing.mats[i][r * N + c] = k * (cplx{1, 0} - w);
            }
        }
    }
    return {std::move(proper), std::move(smoothing)};
}

namespace {

// Max-norm of an order-d circular finite difference of the kernel along one
// index axis, scaled by the grid spacing; the two outer loops range over the
// remaining index dimensions.
double fd_max(const std::vector<cplx>& mat, long long stride_axis, long long count_axis,
              long long stride_o1, long long count_o1, long long stride_o2,
              long long count_o2, int order, double h) {
    double best = 0;
    for (long long o1 = 0; o1 < count_o1; ++o1) {
        for (long long o2 = 0; o2 < count_o2; ++o2) {
            long long base = o1 * stride_o1 + o2 * stride_o2;
            for (long long i = 0; i < count_axis; ++i) {
                cplx acc{0, 0};
                // binomial stencil (-1)^r C(order, r) at offsets i+r
                double sign = 1;
                long long comb = 1;
                for (int r = 0; r <= order; ++r) {
                    long long idx = base + ((i + r) % count_axis) * stride_axis;
                    acc += sign * static_cast<double>(comb) * mat[idx];
                    sign = -sign;
                    comb = comb * (order - r) / (r + 1);
                }
                best = std::max(best, std::abs(acc) / std::pow(h, order));
            }
        }
    }
    return best;
}

}  // namespace

GridFunctionFamily apply_regular_kernel(const KernelMatrix& k, const GridFunctionFamily& u) {
    long long N = k.spec.size();
    if (u.spec.n != k.spec.n || u.spec.G != k.spec.G)
        throw ValidationError("kernel/grid mismatch");
    u.validate();
    if (static_cast<int>(u.data.size()) != k.eps_grid.count())
        throw ValidationError("kernel/input eps grids differ");

    // Smoothness certificate: finite-difference derivative max-norms along each
    // index axis must stay moderate with a uniform growth exponent.
    double h = k.spec.spacing();
    bool two_d = k.spec.n == 2;
    std::vector<std::vector<double>> nets;  // [deriv][eps]
    for (int order = 0; order <= 2; ++order) {
        std::vector<double> vals;
        for (auto& mat : k.mats) {
            double best = 0;
            if (order == 0) {
                for (auto& v : mat) best = std::max(best, std::abs(v));
            } else if (!two_d) {
                // entry index r*N + c: vary row r, then column c
                best = std::max(fd_max(mat, N, N, 1, N, 0, 1, order, h),
                                fd_max(mat, 1, N, N, N, 0, 1, order, h));
            } else {
                // row = x0*G + x1, column = y0*G + y1; entry (x0*G+x1)*N + c
                long long G = k.spec.G;
                best = std::max({fd_max(mat, G * N, G, N, G, 1, N, order, h),
                                 fd_max(mat, N, G, G * N, G, 1, N, order, h),
                                 fd_max(mat, G, G, N, N, 1, G, order, h),
                                 fd_max(mat, 1, G, N, N, G, G, order, h)});
            }
            vals.push_back(best);
        }
        nets.push_back(std::move(vals));
    }
    double base_slope;
    std::vector<double> slopes;
    for (auto& vals : nets) {
        NetSample net = make_net(k.eps_grid, vals);
        if (net.all_floored()) {
            slopes.push_back(-std::numeric_limits<double>::infinity());
            continue;
        }
        try {
            slopes.push_back(fit_growth_exponent(net).slope);
        } catch (const DegenerateFit&) {
            slopes.push_back(-std::numeric_limits<double>::infinity());
        }
    }
    base_slope = std::max(0.0, slopes[0]);
    for (double s : slopes)
        if (!(s <= base_slope + 0.5) || s > default_thresholds().moderate_max_slope)
            throw NoCertificate("kernel derivative growth not uniformly moderate");

    GridFunctionFamily out;
    out.spec = u.spec;
    out.eps_grid = u.eps_grid;
    out.label = "kernel_apply";
    out.data.assign(u.data.size(), std::vector<cplx>(N));
    double w = k.spec.cell_weight();
    for (size_t i = 0; i < u.data.size(); ++i) {
        for (long long r = 0; r < N; ++r) {
            cplx acc{0, 0};
            const cplx* row = k.mats[i].data() + r * N;
            for (long long c = 0; c < N; ++c) acc += row[c] * u.data[i][c];
            out.data[i][r] = acc * w;
        }
    }
    return out;
}

std::vector<cplx> plane_wave_composition(const SymbolFamily& a, const SymbolFamily& b,
                                         const GridSpec& spec, const int* kfreq,
                                         double eps) {
    long long N = spec.size();
    std::vector<cplx> wave(N), mid, outv(N);
    for (long long m = 0; m < N; ++m) {
        double x0 = spec.n == 1 ? spec.point(static_cast<int>(m))
                                : spec.point(static_cast<int>(m / spec.G));
        double x1 = spec.n == 1 ? 0.0 : spec.point(static_cast<int>(m % spec.G));
        double phase = kfreq[0] * x0 + (spec.n == 2 ? kfreq[1] * x1 : 0.0);
        wave[m] = std::polar(1.0, phase);
    }
    apply_symbol(b, spec, eps, wave, mid);
    std::vector<cplx> res;
    apply_symbol(a, spec, eps, mid, res);
    for (long long m = 0; m < N; ++m) outv[m] = res[m] / wave[m];
    return outv;
}

}  // namespace mlg
