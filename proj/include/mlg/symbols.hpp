#pragma once
// Symbol families a_eps(x, xi): exact differentiation, seminorm and order
// estimation, micro-ellipticity, microsupport, cone and proper cutoffs.

#include "mlg/expr.hpp"
#include "mlg/nets.hpp"

namespace mlg {

struct SymbolFamily {
    ComplexExpr expr;
    double order = 0.0;
    int dim = 1;  // n in {1,2}
    std::optional<NetSample> scale_witness;
    std::string label;

    bool xi_independent() const {
        return !cdepends_on_any(expr, {Var::Xi0, Var::Xi1});
    }
    bool x_independent() const {
        return !cdepends_on_any(expr, {Var::X0, Var::X1});
    }
};

cplx eval_symbol(const SymbolFamily& a, const double* x, const double* xi, double eps,
                 double t = 0.0);

// alpha: xi multi-index, beta: x multi-index (length = dim).
SymbolFamily diff_symbol(const SymbolFamily& a, const std::vector<int>& alpha,
                         const std::vector<int>& beta, int cap = 12);

struct ConeGrid {
    int n = 2;                 // dimension (1 or 2)
    int D = 16;                // sectors for n=2; ignored for n=1 (two half-lines)
    double min_radius = 1.0;

    int sector_count() const { return n == 1 ? 2 : D; }
    // Center angle of sector d (n=2); for n=1 sector 0 = {+}, 1 = {-}.
    double center_angle(int d) const { return kTwoPi * d / D; }
    // Unit direction of the sector center.
    void center_dir(int d, double* out) const {
        if (n == 1) {
            out[0] = d == 0 ? 1.0 : -1.0;
            return;
        }
        out[0] = std::cos(center_angle(d));
        out[1] = std::sin(center_angle(d));
    }
    // Sector spans overlap by one half-width: half-width = 2*pi/D.
    bool contains(int d, double kx, double ky) const {
        if (n == 1) return d == 0 ? kx > 0 : kx < 0;
        double th = std::atan2(ky, kx) - center_angle(d);
        th = std::remainder(th, kTwoPi);
        return std::abs(th) <= kTwoPi / D + 1e-12;
    }
};

struct SamplingBox {
    double center[2] = {0, 0};
    double half_widths[2] = {1, 1};
    int points_per_axis = 8;
};

// Default logarithmic shell radii 1, 2, ..., 2^10.
std::vector<double> default_xi_radii();

NetSample estimate_seminorm(const SymbolFamily& a, const SamplingBox& K,
                            const std::vector<int>& alpha, const std::vector<int>& beta,
                            double m, const EpsilonGrid& grid,
                            const std::vector<double>& xi_radii = default_xi_radii());

double estimate_order(const SymbolFamily& a, const SamplingBox& K,
                      const EpsilonGrid& grid);

enum class EllVerdict { SlowScaleElliptic, EllipticModerate, Characteristic };

struct EllipticityCell {
    int box_id = 0;
    int sector_id = 0;
    EllVerdict verdict = EllVerdict::Characteristic;
    NetSample r_net;  // fitted radius-threshold witness r(eps)
    NetSample s_net;  // worst modulus-ratio witness s(eps)
    double r_slope = 0, s_slope = 0;
};

struct EllipticityReport {
    std::vector<EllipticityCell> cells;
    bool all_slow_scale_elliptic() const {
        for (auto& c : cells)
            if (c.verdict != EllVerdict::SlowScaleElliptic) return false;
        return !cells.empty();
    }
};

EllipticityReport microellipticity_report(
    const SymbolFamily& a, const std::vector<SamplingBox>& boxes, const ConeGrid& cones,
    const EpsilonGrid& grid, const std::vector<double>& xi_radii = default_xi_radii());

std::vector<std::pair<int, int>> characteristic_set(
    const SymbolFamily& a, const std::vector<SamplingBox>& boxes, const ConeGrid& cones,
    const EpsilonGrid& grid);

struct MicrosupportCell {
    int box_id = 0;
    int sector_id = 0;
    bool smoothing = false;
    double uniform_exponent = 0.0;  // N*
    std::vector<double> slopes;     // per tested (weight, derivative) pair
};

struct MicrosupportEstimate {
    std::vector<MicrosupportCell> cells;
};

MicrosupportEstimate microsupport_estimate(
    const SymbolFamily& a, const std::vector<SamplingBox>& boxes, const ConeGrid& cones,
    const EpsilonGrid& grid, const std::vector<double>& weights = {-4, -2, 0},
    int max_deriv = 4);

SymbolFamily build_cone_cutoff(const std::vector<double>& direction,
                               double inner_halfangle, double outer_halfangle, int n);

// chi(x, y): 1 near the diagonal (periodic chordal distance <= width), 0 beyond
// twice the width. Expression over x and y variables.
ComplexExpr build_proper_cutoff(double diag_width, int n);

}  // namespace mlg
