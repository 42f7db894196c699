#pragma once
// Wave front estimation from directional Fourier decay of windowed slices,
// G-infinity verdicts, singular support, and microlocality checks.

#include <map>

#include "mlg/quantize.hpp"
#include "mlg/symbols.hpp"

namespace mlg {

struct CellDecomposition {
    GridSpec spec;
    int C = 8;  // cells per axis, divides G

    CellDecomposition() = default;
    CellDecomposition(const GridSpec& s, int cells = 8) : spec(s), C(cells) {
        if (C < 2 || spec.G % C != 0) throw ValidationError("C must divide G");
    }
    int cell_count() const { return spec.n == 1 ? C : C * C; }
    double cell_width() const { return kTwoPi / C; }
    // Periodized per-axis smoothstep window for cell c.
    double window_axis(int c, double x) const;
    // Index helpers: 2D cell id = cx * C + cy.
    int cell_x(int id) const { return spec.n == 1 ? id : id / C; }
    int cell_y(int id) const { return spec.n == 1 ? 0 : id % C; }
    double cell_center(int axis_cell) const { return (axis_cell + 0.5) * cell_width(); }
};

struct DirectionalDecayTable {
    GridSpec spec;
    EpsilonGrid eps_grid;
    int C = 8, L = 8, nsec = 2;
    double kmin = 1, kmax = 128;
    // Per cell: M and argmax radius A indexed [sector][l][eps] flattened; cell
    // gmax and global glob indexed [l][eps].
    std::vector<std::vector<double>> M, A, gmax;
    std::vector<double> glob;

    int ne() const { return eps_grid.count(); }
    int idx(int sector, int l, int ji) const { return (sector * (L + 1) + l) * ne() + ji; }
    int gidx(int l, int ji) const { return l * ne() + ji; }
};

struct RegularityVerdict {
    bool regular = true;
    double slope = 0.0;   // fitted d/dl of N(l); +inf for the saturated-singular case
    double N0 = 0.0;      // N(0) when fitted
    int fitted_count = 0;
    bool saturated = false;
};

struct WfConfig {
    int L = 8;
    double tau_dir = 0.15;
    double n_max = 40.0;
};

struct WavefrontEstimate {
    std::map<std::pair<int, int>, RegularityVerdict> verdicts;  // (cell, sector)
    int C = 8, nsec = 2, n = 1;

    std::vector<std::pair<int, int>> singular_set() const {
        std::vector<std::pair<int, int>> out;
        for (auto& [k, v] : verdicts)
            if (!v.regular) out.push_back(k);
        return out;
    }
};

DirectionalDecayTable decay_table(const GridFunctionFamily& u,
                                  const CellDecomposition& cells, const ConeGrid& cones,
                                  int L = 8);

RegularityVerdict direction_verdict(const DirectionalDecayTable& t, int cell, int sector,
                                    double tau_dir = 0.15, double n_max = 40.0);

WavefrontEstimate wavefront_estimate(const GridFunctionFamily& u,
                                     const CellDecomposition& cells,
                                     const ConeGrid& cones,
                                     const WfConfig& cfg = WfConfig{});

std::vector<int> singsupp_estimate(const GridFunctionFamily& u,
                                   const CellDecomposition& cells, const ConeGrid& cones,
                                   const WfConfig& cfg = WfConfig{});

struct GinfReport {
    bool verdict = false;
    std::vector<double> exponents;  // N_alpha in derivative order
    double spread = 0.0;            // max N_alpha - N_0
};

GinfReport ginf_verdict(const GridFunctionFamily& u, int D_max = 6);

// One-cell/one-sector dilation of a (cell, sector) set; cells wrap on the
// torus, sectors wrap for n = 2 and stay fixed for n = 1.
std::vector<std::pair<int, int>> dilate_cell_sector(
    const std::vector<std::pair<int, int>>& s, int C, int n, int nsec);

bool subset_of(const std::vector<std::pair<int, int>>& small,
               const std::vector<std::pair<int, int>>& big);

struct InclusionReport {
    bool pass = false;
    std::vector<std::pair<int, int>> left, right;
    std::vector<std::pair<int, int>> violations;
};

InclusionReport verify_microlocality(const SymbolFamily& a, const GridFunctionFamily& u,
                                     const CellDecomposition& cells,
                                     const ConeGrid& cones,
                                     const WfConfig& cfg = WfConfig{});

struct NonCharReport {
    bool pass = false;
    InclusionReport forward;   // WF(Pu) subset dil(WF(u))
    InclusionReport backward;  // WF(u) subset dil(WF(Pu) + Char)
};

NonCharReport verify_noncharacteristic(const SymbolFamily& a, const GridFunctionFamily& u,
                                       const CellDecomposition& cells,
                                       const ConeGrid& cones,
                                       const WfConfig& cfg = WfConfig{});

// Sampling boxes matching the spatial cells of a decomposition.
std::vector<SamplingBox> cell_boxes(const CellDecomposition& cells);

}  // namespace mlg
