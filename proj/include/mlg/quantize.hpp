#pragma once
// FFT-based Kohn-Nirenberg quantization on the periodic torus [0, 2*pi)^n,
// kernel extraction, proper/smoothing kernel splitting.

#include "mlg/symbols.hpp"

namespace mlg {

struct GridSpec {
    int n = 1;
    int G = 256;

    GridSpec() = default;
    GridSpec(int dim, int points) : n(dim), G(points) {
        if (n != 1 && n != 2) throw ValidationError("dimension must be 1 or 2");
        if (G < 64 || (G & (G - 1)) != 0) throw ValidationError("G must be a power of 2, >= 64");
        if ((n == 1 && G > 1024) || (n == 2 && G > 512))
            throw ValidationError("grid too large for dimension");
    }
    long long size() const { return n == 1 ? G : static_cast<long long>(G) * G; }
    double point(int m) const { return kTwoPi * m / G; }
    int freq(int idx) const { return idx < G / 2 ? idx : idx - G; }
    double spacing() const { return kTwoPi / G; }
    double cell_weight() const { return std::pow(kTwoPi / G, n); }
};

struct GridFunctionFamily {
    GridSpec spec;
    EpsilonGrid eps_grid;
    std::vector<std::vector<cplx>> data;  // per eps, row-major, size G^n
    std::string label;

    void validate() const {
        if (static_cast<int>(data.size()) != eps_grid.count())
            throw ValidationError("eps slice count mismatch");
        for (auto& d : data) {
            if (static_cast<long long>(d.size()) != spec.size())
                throw ValidationError("grid data size mismatch");
            for (auto& v : d)
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw NonFinite("grid value not finite");
        }
    }
    NetSample max_norm_net() const {
        std::vector<double> vals;
        for (auto& d : data) {
            double m = 0;
            for (auto& v : d) m = std::max(m, std::abs(v));
            vals.push_back(m);
        }
        return make_net(eps_grid, std::move(vals));
    }
};

// Forward: u_hat(k) = sum_m u(x_m) e^{-i k x_m}; inverse carries 1/G^n.
void fft_forward(const GridSpec& spec, const std::vector<cplx>& in, std::vector<cplx>& out);
void fft_inverse(const GridSpec& spec, const std::vector<cplx>& in, std::vector<cplx>& out);

// Single-eps application; chooses multiplier, pointwise, separable, or direct path.
void apply_symbol(const SymbolFamily& a, const GridSpec& spec, double eps,
                  const std::vector<cplx>& in, std::vector<cplx>& out);

GridFunctionFamily quantize_kn(const SymbolFamily& a, const GridFunctionFamily& u);

struct KernelMatrix {
    GridSpec spec;
    EpsilonGrid eps_grid;
    std::vector<std::vector<cplx>> mats;  // per eps, (G^n)x(G^n) row-major
};

KernelMatrix kernel_matrix(const SymbolFamily& a, const GridSpec& spec,
                           const EpsilonGrid& grid);

std::pair<KernelMatrix, KernelMatrix> split_proper_smoothing(const SymbolFamily& a,
                                                             const ComplexExpr& chi,
                                                             const GridSpec& spec,
                                                             const EpsilonGrid& grid);

GridFunctionFamily apply_regular_kernel(const KernelMatrix& k, const GridFunctionFamily& u);

// Exact composition symbol sample c(x_m, k) = e^{-i k x_m} (Op(a) Op(b) e_k)(x_m)
// obtained by probing with the plane wave e_k = e^{i k x}.
std::vector<cplx> plane_wave_composition(const SymbolFamily& a, const SymbolFamily& b,
                                         const GridSpec& spec, const int* k, double eps);

}  // namespace mlg
