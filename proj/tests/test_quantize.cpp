#include <doctest.h>

#include "mlg/quantize.hpp"
#include "mlg/symbols.hpp"

using namespace mlg;

namespace {

SymbolFamily mk(ComplexExpr e, double order, int dim) {
    SymbolFamily a;
    a.expr = std::move(e);
    a.order = order;
    a.dim = dim;
    return a;
}

std::vector<cplx> plane_wave(const GridSpec& spec, int k) {
    std::vector<cplx> u(spec.G);
    for (int m = 0; m < spec.G; ++m) u[m] = std::exp(cplx(0, k * spec.point(m)));
    return u;
}

}  // namespace

TEST_CASE("Op(xi) is the Fourier multiplier k") {
    GridSpec spec(1, 128);
    auto a = mk(ComplexExpr::real(evar(Var::Xi0)), 1, 1);
    for (int k : {1, 5, -7}) {
        auto u = plane_wave(spec, k);
        std::vector<cplx> v;
        apply_symbol(a, spec, 1.0, u, v);
        for (int m = 0; m < spec.G; ++m)
            CHECK(std::abs(v[m] - double(k) * u[m]) < 1e-10);
    }
}

TEST_CASE("xi-independent symbols act pointwise") {
    GridSpec spec(1, 128);
    auto a = mk(ComplexExpr::real(esin(evar(Var::X0))), 0, 1);
    auto u = plane_wave(spec, 3);
    std::vector<cplx> v;
    apply_symbol(a, spec, 1.0, u, v);
    for (int m = 0; m < spec.G; ++m)
        CHECK(std::abs(v[m] - std::sin(spec.point(m)) * u[m]) < 1e-12);
}

TEST_CASE("plane-wave composition probe reproduces a multiplier-free symbol") {
    GridSpec spec(1, 128);
    auto one = mk(ComplexExpr::constant(1.0), 0, 1);
    auto b = mk(ComplexExpr::real(esin(evar(Var::X0))), 0, 1);
    int k = 9;
    auto c = plane_wave_composition(one, b, spec, &k, 1.0);
    for (int m = 0; m < spec.G; ++m)
        CHECK(std::abs(c[m] - cplx(std::sin(spec.point(m)), 0)) < 1e-10);
}

TEST_CASE("kernel application matches direct quantization for a smooth kernel") {
    GridSpec spec(1, 64);
    EpsilonGrid grid(1, 6);
    auto a = mk(ComplexExpr::real(eexp(eneg(
                    ediv(emul(evar(Var::Xi0), evar(Var::Xi0)), econst(16.0))))),
                0, 1);
    auto K = kernel_matrix(a, spec, grid);
    GridFunctionFamily u;
    u.spec = spec;
    u.eps_grid = grid;
    for (int ji = 0; ji < grid.count(); ++ji) u.data.push_back(plane_wave(spec, 2));
    auto via_kernel = apply_regular_kernel(K, u);
    auto direct = quantize_kn(a, u);
    for (int ji = 0; ji < grid.count(); ++ji)
        for (int m = 0; m < spec.G; ++m)
            CHECK(std::abs(via_kernel.data[ji][m] - direct.data[ji][m]) < 1e-8);
}

TEST_CASE("proper/smoothing split is a decomposition") {
    GridSpec spec(1, 64);
    EpsilonGrid grid(1, 6);
    auto a = mk(ComplexExpr::real(eexp(eneg(
                    ediv(emul(evar(Var::Xi0), evar(Var::Xi0)), econst(16.0))))),
                0, 1);
    auto chi = build_proper_cutoff(kPi / 4, 1);
    auto [proper, smoothing] = split_proper_smoothing(a, chi, spec, grid);
    auto K = kernel_matrix(a, spec, grid);
    for (int ji = 0; ji < grid.count(); ++ji)
        for (size_t i = 0; i < K.mats[ji].size(); ++i)
            CHECK(std::abs(proper.mats[ji][i] + smoothing.mats[ji][i] - K.mats[ji][i]) <
                  1e-12);
}

TEST_CASE("forward and inverse FFT round trip") {
    GridSpec spec(2, 64);
    std::vector<cplx> u(spec.size());
    for (size_t i = 0; i < u.size(); ++i)
        u[i] = cplx(std::sin(0.01 * double(i)), std::cos(0.02 * double(i)));
    std::vector<cplx> hat, back;
    fft_forward(spec, u, hat);
    fft_inverse(spec, hat, back);
    for (size_t i = 0; i < u.size(); ++i) CHECK(std::abs(u[i] - back[i]) < 1e-12);
}
