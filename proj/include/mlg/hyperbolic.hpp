#pragma once
// Hamilton flow, bicharacteristic lifts, symbol transport, spectral Cauchy
// solver for d_t u + i P(t, x, D) u = 0, and propagation verification.

#include "mlg/wavefront.hpp"

namespace mlg {

struct HamiltonianField {
    SymbolFamily P1;  // real principal symbol, order 1, degree-1 homogeneous
    int n = 1;

    // Checks realness and positive homogeneity on a sample lattice.
    void validate() const;
};

struct FlowState {
    double x[2] = {0, 0};
    double xi[2] = {1, 0};
    double t = 0.0;
};

// Integrates dx/dt = grad_xi P1, dxi/dt = -grad_x P1 from s0 for time t
// (signed); x wrapped to the torus. Richardson dt/2 comparison must agree to
// 1e-6 relative or StepTooLarge is thrown.
FlowState hamilton_flow(const HamiltonianField& field, const FlowState& s0, double t,
                        double dt);

struct LiftPoint {
    double t = 0;
    double x[2] = {0, 0};
    double xi[2] = {0, 0};
    double tau = 0;
};

std::vector<LiftPoint> bicharacteristic_lift(const HamiltonianField& field,
                                             const double* x0, const double* xi0,
                                             double t_begin, double t_end, double dt);

struct TransportTable {
    int cells = 0, sectors = 0, shells = 0;
    std::vector<cplx> values;  // [cell][sector][shell]
    cplx at(int c, int d, int s) const {
        return values[(static_cast<size_t>(c) * sectors + d) * shells + s];
    }
};

TransportTable transport_symbol(const SymbolFamily& q, const HamiltonianField& field,
                                double t, const CellDecomposition& cells,
                                const ConeGrid& cones, const std::vector<double>& radii,
                                double dt, double eps = 1.0);

struct CauchyProblemSpec {
    HamiltonianField field;
    std::optional<SymbolFamily> lower;  // lower-order part, ignored by the flow
    GridFunctionFamily g;
    double T = 1.0;
    double dt = 0.0;  // 0: choose from the CFL bound
    std::vector<double> record_times;
};

// CFL bound 0.5 / (G * max |grad_xi P1|).
double cfl_bound(const HamiltonianField& field, const GridSpec& spec);

std::vector<GridFunctionFamily> solve_cauchy(const CauchyProblemSpec& spec);

struct PropagationSnapshot {
    double t = 0;
    std::vector<std::pair<int, int>> estimated;
    std::vector<std::pair<int, int>> predicted;
    bool pass = false;
};

struct PropagationReport {
    std::vector<PropagationSnapshot> snapshots;
    bool pass = false;
};

PropagationReport verify_propagation(const CauchyProblemSpec& spec,
                                     const CellDecomposition& cells,
                                     const ConeGrid& cones,
                                     const WfConfig& cfg = WfConfig{},
                                     double flow_dt = 1e-3);

// Project a space-time (x, t) wave front estimate onto x-cells and xi-sectors
// at time t0; throws ConormalPresent when a pure-tau sector is singular on the
// t0 rows.
std::vector<std::pair<int, int>> wf_restrict_predict(const WavefrontEstimate& wf,
                                                     const CellDecomposition& cells,
                                                     const ConeGrid& cones, double t0);

}  // namespace mlg
