#include "mlg/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mlg {
namespace {

void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw ValidationError("truncated MLGF header");
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
    static_assert(sizeof(double) == 8);
    uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw ValidationError("truncated MLGF data");
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

}  // namespace

void write_mlgf(const std::string& path, const GridFunctionFamily& u) {
    u.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open '" + path + "' for writing");
    os.write("MLGF", 4);
    put_u32(os, 1);
    put_u32(os, static_cast<uint32_t>(u.spec.n));
    put_u32(os, static_cast<uint32_t>(u.spec.G));
    put_u32(os, static_cast<uint32_t>(u.data.size()));
    for (auto& slice : u.data)
        for (auto& v : slice) {
            put_f64(os, v.real());
            put_f64(os, v.imag());
        }
    if (!os) throw ValidationError("write failure on '" + path + "'");
}

GridFunctionFamily read_mlgf(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "MLGF", 4) != 0) throw ValidationError("bad MLGF magic");
    if (get_u32(is) != 1) throw ValidationError("unsupported MLGF version");
    uint32_t n = get_u32(is), G = get_u32(is), ne = get_u32(is);
    if (ne < 6 || ne > 64) throw ValidationError("unsupported MLGF eps count");
    GridFunctionFamily u;
    u.spec = GridSpec(static_cast<int>(n), static_cast<int>(G));
    u.eps_grid = EpsilonGrid(1, static_cast<int>(ne));
    for (uint32_t s = 0; s < ne; ++s) {
        std::vector<cplx> slice(u.spec.size());
        for (auto& v : slice) {
            double re = get_f64(is), im = get_f64(is);
            v = cplx(re, im);
        }
        u.data.push_back(std::move(slice));
    }
    u.validate();
    return u;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string wavefront_csv(const WavefrontEstimate& wf, const CellDecomposition& cells,
                          const ConeGrid& cones) {
    std::ostringstream os;
    os << "cell_x,cell_y,sector,theta_center,regular,N0,slope\n";
    for (auto& [key, v] : wf.verdicts) {
        auto [cell, sector] = key;
        double theta = cells.spec.n == 1 ? (sector == 0 ? 0.0 : kPi)
                                         : cones.center_angle(sector);
        os << cells.cell_x(cell) << ',' << cells.cell_y(cell) << ',' << sector << ','
           << format_double(theta) << ',' << (v.regular ? 1 : 0) << ','
           << format_double(v.N0) << ',' << format_double(v.slope) << '\n';
    }
    return os.str();
}

std::string residual_csv(const std::vector<std::pair<int, double>>& orders) {
    std::ostringstream os;
    os << "r,fitted_order\n";
    for (auto& [r, o] : orders) os << r << ',' << format_double(o) << '\n';
    return os.str();
}

std::string lift_csv(const std::vector<LiftPoint>& pts, int n) {
    std::ostringstream os;
    if (n == 1)
        os << "t,x0,xi0,tau\n";
    else
        os << "t,x0,x1,xi0,xi1,tau\n";
    for (auto& p : pts) {
        os << format_double(p.t) << ',' << format_double(p.x[0]);
        if (n == 2) os << ',' << format_double(p.x[1]);
        os << ',' << format_double(p.xi[0]);
        if (n == 2) os << ',' << format_double(p.xi[1]);
        os << ',' << format_double(p.tau) << '\n';
    }
    return os.str();
}

std::string classification_csv(const std::vector<std::pair<std::string, ScaleClass>>& rows) {
    std::ostringstream os;
    os << "name,class,exponent,slope,r_squared\n";
    for (auto& [name, c] : rows) {
        os << name << ',' << scale_tag_name(c.tag) << ','
           << (c.exponent ? format_double(*c.exponent) : std::string()) << ','
           << format_double(c.fit.slope) << ',' << format_double(c.fit.r_squared) << '\n';
    }
    return os.str();
}

static nlohmann::json pairs_json(const std::vector<std::pair<int, int>>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (auto& [c, d] : v) a.push_back({c, d});
    return a;
}

nlohmann::json inclusion_json(const InclusionReport& r) {
    return {{"pass", r.pass},
            {"left", pairs_json(r.left)},
            {"right", pairs_json(r.right)},
            {"violations", pairs_json(r.violations)}};
}

nlohmann::json propagation_json(const PropagationReport& r) {
    nlohmann::json snaps = nlohmann::json::array();
    for (auto& s : r.snapshots) {
        std::vector<std::pair<int, int>> extras, missing;
        auto dil_pred = dilate_cell_sector(s.predicted, 8, 2, 16);
        auto dil_est = dilate_cell_sector(s.estimated, 8, 2, 16);
        for (auto& p : s.estimated)
            if (!subset_of({p}, dil_pred)) extras.push_back(p);
        for (auto& p : s.predicted)
            if (!subset_of({p}, dil_est)) missing.push_back(p);
        snaps.push_back({{"t", s.t},
                         {"pass", s.pass},
                         {"estimated", pairs_json(s.estimated)},
                         {"predicted", pairs_json(s.predicted)},
                         {"extras", pairs_json(extras)},
                         {"missing", pairs_json(missing)}});
    }
    return {{"pass", r.pass}, {"snapshots", snaps}};
}

nlohmann::json verdict_json(const RegularityVerdict& v) {
    return {{"regular", v.regular},
            {"slope", std::isfinite(v.slope) ? nlohmann::json(v.slope) : nlohmann::json("inf")},
            {"N0", v.N0},
            {"fitted_count", v.fitted_count},
            {"saturated", v.saturated}};
}

nlohmann::json wavefront_json(const WavefrontEstimate& wf) {
    nlohmann::json entries = nlohmann::json::array();
    for (auto& [key, v] : wf.verdicts) {
        auto j = verdict_json(v);
        j["cell"] = key.first;
        j["sector"] = key.second;
        entries.push_back(j);
    }
    return {{"C", wf.C}, {"nsec", wf.nsec}, {"n", wf.n}, {"entries", entries},
            {"singular", pairs_json(wf.singular_set())}};
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw ValidationError("write failure on '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace mlg
