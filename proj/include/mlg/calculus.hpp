#pragma once
// Asymptotic expansions: composition, adjoint, transpose, amplitude reduction,
// Borel-type summation, and the elliptic parametrix recursion.

#include "mlg/quantize.hpp"
#include "mlg/symbols.hpp"

namespace mlg {

struct ExpansionTerm {
    double order = 0.0;
    SymbolFamily term;
};

struct Expansion {
    std::vector<ExpansionTerm> terms;  // orders strictly decreasing
    std::optional<NetSample> common_witness;
    bool refined = false;
    int dim = 1;

    ComplexExpr partial_sum(int r) const {
        ComplexExpr s = ComplexExpr::constant(0.0);
        for (int j = 0; j < r && j < static_cast<int>(terms.size()); ++j)
            s = s + terms[j].term.expr;
        return s;
    }
};

Expansion expand_compose(const SymbolFamily& a, const SymbolFamily& b, int r);
Expansion expand_adjoint(const SymbolFamily& a, int r);
Expansion expand_transpose(const SymbolFamily& a, int r);

// Amplitude b(x, y, xi) reduced to a left symbol.
Expansion reduce_amplitude(const ComplexExpr& b, int dim, double order, int r);

struct BorelSumResult {
    SymbolFamily symbol;
    std::vector<double> cut_radii;
    int terms_used = 0;
};

BorelSumResult borel_sum(const Expansion& e, const std::vector<SamplingBox>& probe_boxes,
                         const EpsilonGrid& grid);

struct ParametrixResult {
    Expansion expansion;
    SymbolFamily truncated_symbol;
    double excision_radius = 0.0;
    double residual_order_estimate = 0.0;
};

ParametrixResult parametrix(const SymbolFamily& a, int r,
                            const std::vector<SamplingBox>& probe_boxes,
                            const ConeGrid& cones, const EpsilonGrid& grid);

// Fitted order of (a # p truncated at r terms) - 1.
double expansion_residual_order(const SymbolFamily& a, const ParametrixResult& p, int r,
                                const SamplingBox& K, const EpsilonGrid& grid);

// Fitted frequency order of the plane-wave-probed composition residual
// c_exact(x, k) - sum_{|gamma|<r} expansion terms at (x, k).
double composition_residual_order(const SymbolFamily& a, const SymbolFamily& b, int r,
                                  const GridSpec& spec, const EpsilonGrid& grid);

}  // namespace mlg
