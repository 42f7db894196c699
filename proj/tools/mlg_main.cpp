// mlg: scenario-driven batch runner for the generalized microlocal toolkit.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "mlg/calculus.hpp"
#include "mlg/fixtures.hpp"
#include "mlg/io.hpp"
#include "mlg/scenarios.hpp"

using namespace mlg;
namespace fs = std::filesystem;

namespace {

struct Cfg {
    std::string out = "out";
    int grid = 256;
    int cells = 8;
    int sectors = 16;
    std::string eps = "1:8";
    int max_l = 8;
    int trunc = 3;
    uint64_t seed = 1;
    double min_radius = 0;  // 0: G/8 default
    std::string fixture = "delta";
    std::string symbol = "xi";
    std::string symbol_b = "sin_x";
    double t = 1.0;
    std::string scenario_file;
};

EpsilonGrid parse_eps(const std::string& s) {
    auto pos = s.find(':');
    if (pos == std::string::npos) throw ValidationError("--eps expects a:b");
    return EpsilonGrid(std::stoi(s.substr(0, pos)), std::stoi(s.substr(pos + 1)));
}

int fixture_dim(const std::string& name) {
    for (auto& f : fixture_catalog())
        if (f.name == name) return f.dim;
    throw ValidationError("unknown fixture '" + name + "'");
}

struct Ctx {
    Cfg cfg;
    EpsilonGrid grid_eps{1, 8};
    GridSpec spec;
    CellDecomposition cells;
    ConeGrid cones;

    explicit Ctx(const Cfg& c, int dim) : cfg(c) {
        grid_eps = parse_eps(c.eps);
        spec = GridSpec(dim, c.grid);
        cells = CellDecomposition(spec, c.cells);
        cones.n = dim;
        cones.D = c.sectors;
        cones.min_radius = c.min_radius > 0 ? c.min_radius : spec.G / 8.0;
        fs::create_directories(c.out);
    }
    GridFunctionFamily fixture() const {
        return make_fixture(cfg.fixture, spec, grid_eps, cfg.seed);
    }
    std::string path(const std::string& f) const { return cfg.out + "/" + f; }
};

std::vector<SamplingBox> whole_torus_box(int dim) {
    std::vector<SamplingBox> b(1);
    for (int i = 0; i < dim; ++i) {
        b[0].center[i] = kPi;
        b[0].half_widths[i] = kPi;
    }
    return b;
}

nlohmann::json expansion_json(const Expansion& e) {
    nlohmann::json terms = nlohmann::json::array();
    for (auto& t : e.terms)
        terms.push_back({{"order", t.order}, {"expr", to_sexpr(t.term.expr)}});
    return {{"dim", e.dim}, {"terms", terms}};
}

std::string ell_csv(const EllipticityReport& rep) {
    std::string out = "box_id,sector_id,verdict,s_slope,r_slope\n";
    for (auto& c : rep.cells) {
        const char* v = c.verdict == EllVerdict::SlowScaleElliptic ? "SlowScaleElliptic"
                        : c.verdict == EllVerdict::EllipticModerate ? "EllipticModerate"
                                                                    : "Characteristic";
        out += std::to_string(c.box_id) + "," + std::to_string(c.sector_id) + "," + v +
               "," + format_double(c.s_slope) + "," + format_double(c.r_slope) + "\n";
    }
    return out;
}

int run_kind(const std::string& kind, const Cfg& cfg) {
    if (kind == "verify-all") {
        auto results = run_acceptance(cfg.out);
        bool all = true;
        for (auto& r : results) {
            std::cout << "criterion " << r.id << " (" << r.name << "): "
                      << (r.pass ? "PASS" : "FAIL") << "  " << r.detail << "  ["
                      << format_double(r.seconds) << " s]\n";
            all = all && r.pass;
        }
        return all ? 0 : 1;
    }
    if (kind == "classify") {
        Ctx ctx(cfg, fixture_dim(cfg.fixture));
        auto u = ctx.fixture();
        std::vector<std::pair<std::string, ScaleClass>> rows = {
            {cfg.fixture, classify_scale(u.max_norm_net())}};
        write_text(ctx.path("classify.csv"), classification_csv(rows));
        std::cout << ctx.path("classify.csv") << "\n";
        return 0;
    }
    SymbolFamily a = catalog_symbol(cfg.symbol);
    if (kind == "symbol-order") {
        Ctx ctx(cfg, a.dim);
        double m = estimate_order(a, whole_torus_box(a.dim)[0], ctx.grid_eps);
        nlohmann::json j = {{"label", a.label}, {"declared", a.order}, {"estimated", m}};
        write_text(ctx.path("symbol_order.json"), j.dump(2) + "\n");
        std::cout << j.dump() << "\n";
        return 0;
    }
    if (kind == "ellipticity" || kind == "microsupport") {
        Ctx ctx(cfg, a.dim);
        auto boxes = cell_boxes(ctx.cells);
        if (kind == "ellipticity") {
            auto rep = microellipticity_report(a, boxes, ctx.cones, ctx.grid_eps);
            write_text(ctx.path("ellipticity.csv"), ell_csv(rep));
            std::cout << ctx.path("ellipticity.csv") << "\n";
        } else {
            auto est = microsupport_estimate(a, boxes, ctx.cones, ctx.grid_eps);
            std::string out = "box_id,sector_id,smoothing,uniform_exponent\n";
            for (auto& c : est.cells)
                out += std::to_string(c.box_id) + "," + std::to_string(c.sector_id) + "," +
                       (c.smoothing ? "1" : "0") + "," +
                       format_double(c.uniform_exponent) + "\n";
            write_text(ctx.path("microsupport.csv"), out);
            std::cout << ctx.path("microsupport.csv") << "\n";
        }
        return 0;
    }
    if (kind == "compose" || kind == "adjoint" || kind == "transpose") {
        Ctx ctx(cfg, a.dim);
        Expansion e = kind == "compose"
                          ? expand_compose(a, catalog_symbol(cfg.symbol_b), cfg.trunc)
                          : (kind == "adjoint" ? expand_adjoint(a, cfg.trunc)
                                               : expand_transpose(a, cfg.trunc));
        write_text(ctx.path(kind + ".json"), expansion_json(e).dump(2) + "\n");
        std::cout << ctx.path(kind + ".json") << "\n";
        return 0;
    }
    if (kind == "parametrix") {
        Ctx ctx(cfg, a.dim);
        ConeGrid cones = ctx.cones;
        cones.min_radius = 8;
        auto p = parametrix(a, cfg.trunc, whole_torus_box(a.dim), cones, ctx.grid_eps);
        std::vector<std::pair<int, double>> orders;
        for (int r = 1; r <= cfg.trunc; ++r)
            orders.push_back({r, expansion_residual_order(a, p, r, whole_torus_box(a.dim)[0],
                                                          ctx.grid_eps)});
        write_text(ctx.path("parametrix_residual.csv"), residual_csv(orders));
        nlohmann::json j = {{"excision_radius", p.excision_radius},
                            {"residual_order_estimate", p.residual_order_estimate},
                            {"expansion", expansion_json(p.expansion)}};
        write_text(ctx.path("parametrix.json"), j.dump(2) + "\n");
        std::cout << ctx.path("parametrix.json") << "\n";
        return 0;
    }
    if (kind == "apply") {
        Ctx ctx(cfg, a.dim);
        auto v = quantize_kn(a, ctx.fixture());
        write_mlgf(ctx.path("apply.mlgf"), v);
        std::cout << ctx.path("apply.mlgf") << "\n";
        return 0;
    }
    if (kind == "kernel") {
        Cfg small = cfg;
        small.grid = std::min(cfg.grid, 64);
        Ctx ctx(small, a.dim);
        auto k = kernel_matrix(a, ctx.spec, ctx.grid_eps);
        nlohmann::json j = nlohmann::json::array();
        for (auto& m : k.mats) {
            double mx = 0;
            for (auto& v : m) mx = std::max(mx, std::abs(v));
            j.push_back(mx);
        }
        write_text(ctx.path("kernel.json"),
                   nlohmann::json({{"G", ctx.spec.G}, {"max_abs_per_eps", j}}).dump(2) + "\n");
        std::cout << ctx.path("kernel.json") << "\n";
        return 0;
    }
    if (kind == "wavefront" || kind == "singsupp" || kind == "ginf") {
        Ctx ctx(cfg, fixture_dim(cfg.fixture));
        auto u = ctx.fixture();
        if (kind == "ginf") {
            auto rep = ginf_verdict(u, 6);
            nlohmann::json j = {{"verdict", rep.verdict},
                                {"exponents", rep.exponents},
                                {"spread", rep.spread}};
            write_text(ctx.path("ginf.json"), j.dump(2) + "\n");
            std::cout << j.dump() << "\n";
            return 0;
        }
        WfConfig wc;
        wc.L = cfg.max_l;
        if (kind == "wavefront") {
            auto wf = wavefront_estimate(u, ctx.cells, ctx.cones, wc);
            write_text(ctx.path("wavefront.csv"), wavefront_csv(wf, ctx.cells, ctx.cones));
            std::cout << ctx.path("wavefront.csv") << "\n";
        } else {
            auto cs = singsupp_estimate(u, ctx.cells, ctx.cones, wc);
            nlohmann::json j = {{"singular_cells", cs}};
            write_text(ctx.path("singsupp.json"), j.dump(2) + "\n");
            std::cout << j.dump() << "\n";
        }
        return 0;
    }
    if (kind == "microlocality" || kind == "noncharacteristic") {
        Ctx ctx(cfg, a.dim);
        auto u = make_fixture(cfg.fixture, ctx.spec, ctx.grid_eps, cfg.seed);
        if (kind == "microlocality") {
            auto rep = verify_microlocality(a, u, ctx.cells, ctx.cones);
            write_text(ctx.path("microlocality.json"), inclusion_json(rep).dump(2) + "\n");
            return rep.pass ? 0 : 1;
        }
        auto rep = verify_noncharacteristic(a, u, ctx.cells, ctx.cones);
        nlohmann::json j = {{"pass", rep.pass},
                            {"forward", inclusion_json(rep.forward)},
                            {"backward", inclusion_json(rep.backward)}};
        write_text(ctx.path("noncharacteristic.json"), j.dump(2) + "\n");
        return rep.pass ? 0 : 1;
    }
    if (kind == "flow") {
        Ctx ctx(cfg, 1);
        HamiltonianField fld{a, a.dim};
        double x0[2] = {kPi / 2 + 0.1, 0}, xi0[2] = {1, 0};
        auto lift = bicharacteristic_lift(fld, x0, xi0, 0.0, cfg.t, 1e-3);
        write_text(ctx.path("lift.csv"), lift_csv(lift, a.dim));
        std::cout << ctx.path("lift.csv") << "\n";
        return 0;
    }
    if (kind == "propagate") {
        Ctx ctx(cfg, 1);
        auto g = ctx.fixture();
        HamiltonianField fld{a, 1};
        CauchyProblemSpec cp{fld, std::nullopt, g, cfg.t, 0.0, {cfg.t}};
        auto rep = verify_propagation(cp, ctx.cells, ctx.cones);
        write_text(ctx.path("propagation.json"), propagation_json(rep).dump(2) + "\n");
        return rep.pass ? 0 : 1;
    }
    if (kind == "restrict") {
        Ctx ctx(cfg, 2);
        auto u = ctx.fixture();
        auto wf = wavefront_estimate(u, ctx.cells, ctx.cones);
        nlohmann::json j;
        try {
            auto pred = wf_restrict_predict(wf, ctx.cells, ctx.cones, cfg.t);
            nlohmann::json arr = nlohmann::json::array();
            for (auto& [c, d] : pred) arr.push_back({c, d});
            j = {{"t0", cfg.t}, {"conormal", false}, {"predicted", arr}};
        } catch (const ConormalPresent&) {
            j = {{"t0", cfg.t}, {"conormal", true}};
        }
        write_text(ctx.path("restrict.json"), j.dump(2) + "\n");
        std::cout << j.dump() << "\n";
        return 0;
    }
    throw ValidationError("unknown scenario kind '" + kind + "'");
}

void apply_scenario_file(Cfg& cfg, CLI::App* sub) {
    if (cfg.scenario_file.empty()) return;
    auto j = nlohmann::json::parse(read_text(cfg.scenario_file));
    auto take = [&](const char* flag, const char* key, auto& field) {
        auto* opt = sub->get_option_no_throw(flag);
        if (j.contains(key) && (!opt || opt->count() == 0))
            field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("--out", "out", cfg.out);
    take("--grid", "grid", cfg.grid);
    take("--cells", "cells", cfg.cells);
    take("--sectors", "sectors", cfg.sectors);
    take("--eps", "eps", cfg.eps);
    take("--max-l", "max_l", cfg.max_l);
    take("--trunc", "trunc", cfg.trunc);
    take("--seed", "seed", cfg.seed);
    take("--min-radius", "min_radius", cfg.min_radius);
    take("--fixture", "fixture", cfg.fixture);
    take("--symbol", "symbol", cfg.symbol);
    take("--symbol-b", "symbol_b", cfg.symbol_b);
    take("--time", "t", cfg.t);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized microlocal analysis scenario runner"};
    app.require_subcommand(1);
    Cfg cfg;
    std::vector<std::string> kinds = {
        "classify",   "symbol-order", "ellipticity",      "microsupport", "compose",
        "adjoint",    "transpose",    "parametrix",       "apply",        "kernel",
        "wavefront",  "singsupp",     "ginf",             "microlocality",
        "noncharacteristic", "flow",  "propagate",        "restrict",     "verify-all"};
    std::vector<CLI::App*> subs;
    for (auto& k : kinds) {
        auto* sub = app.add_subcommand(k, k + " scenario");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--grid", cfg.grid, "grid points per axis");
        sub->add_option("--cells", cfg.cells, "spatial cells per axis");
        sub->add_option("--sectors", cfg.sectors, "frequency sectors (2D)");
        sub->add_option("--eps", cfg.eps, "dyadic eps range a:b");
        sub->add_option("--max-l", cfg.max_l, "max weight order L");
        sub->add_option("--trunc", cfg.trunc, "expansion truncation r");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--min-radius", cfg.min_radius, "cone min radius (0 = G/8)");
        sub->add_option("--fixture", cfg.fixture, "fixture label");
        sub->add_option("--symbol", cfg.symbol, "symbol label");
        sub->add_option("--symbol-b", cfg.symbol_b, "second symbol label");
        sub->add_option("--time", cfg.t, "evolution time / restriction t0");
        sub->add_option("--scenario", cfg.scenario_file, "scenario JSON overriding defaults");
        subs.push_back(sub);
    }
    CLI11_PARSE(app, argc, argv);
    try {
        for (size_t i = 0; i < kinds.size(); ++i)
            if (subs[i]->parsed()) {
                apply_scenario_file(cfg, subs[i]);
                return run_kind(kinds[i], cfg);
            }
        return 2;
    } catch (const MlgError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
