#pragma once
// Binary grid-family files, CSV exports, and JSON report builders. All output
// is deterministic: fixed float formatting and no timestamps.

#include <nlohmann/json.hpp>

#include "mlg/hyperbolic.hpp"

namespace mlg {

// MLGF binary layout: magic "MLGF", u32 version = 1, u32 n, u32 G, u32
// eps_count, then eps_count row-major slices of G^n little-endian (re, im)
// f64 pairs. Slices correspond to eps_j = 2^-j, j = 1..eps_count.
void write_mlgf(const std::string& path, const GridFunctionFamily& u);
GridFunctionFamily read_mlgf(const std::string& path);

std::string format_double(double v);  // shortest round-trip "%.17g"

std::string wavefront_csv(const WavefrontEstimate& wf, const CellDecomposition& cells,
                          const ConeGrid& cones);
std::string residual_csv(const std::vector<std::pair<int, double>>& orders);
std::string lift_csv(const std::vector<LiftPoint>& pts, int n);
std::string classification_csv(const std::vector<std::pair<std::string, ScaleClass>>& rows);

nlohmann::json inclusion_json(const InclusionReport& r);
nlohmann::json propagation_json(const PropagationReport& r);
nlohmann::json verdict_json(const RegularityVerdict& v);
nlohmann::json wavefront_json(const WavefrontEstimate& wf);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace mlg
