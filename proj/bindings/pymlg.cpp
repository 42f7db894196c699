// Python bindings for the core operations.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mlg/calculus.hpp"
#include "mlg/fixtures.hpp"
#include "mlg/scenarios.hpp"

namespace py = pybind11;
using namespace mlg;

namespace {

GridFunctionFamily build_fixture(const std::string& name, int dim, int G, int j_max,
                                 uint64_t seed) {
    return make_fixture(name, GridSpec(dim, G), EpsilonGrid(1, j_max), seed);
}

py::dict classify_py(const std::vector<double>& values, int j_min) {
    EpsilonGrid grid(j_min, j_min + static_cast<int>(values.size()) - 1);
    auto cls = classify_scale(make_net(grid, values));
    py::dict d;
    d["tag"] = scale_tag_name(cls.tag);
    d["slope"] = cls.fit.slope;
    if (cls.exponent) d["exponent"] = *cls.exponent;
    return d;
}

py::list wavefront_py(const std::string& fixture, int dim, int G, int j_max, int C, int D,
                      double min_radius, uint64_t seed) {
    auto u = build_fixture(fixture, dim, G, j_max, seed);
    CellDecomposition cells(u.spec, C);
    ConeGrid cones;
    cones.n = dim;
    cones.D = D;
    cones.min_radius = min_radius > 0 ? min_radius : G / 8.0;
    auto wf = wavefront_estimate(u, cells, cones);
    py::list out;
    for (auto& [key, v] : wf.verdicts) {
        py::dict d;
        d["cell"] = key.first;
        d["sector"] = key.second;
        d["regular"] = v.regular;
        d["slope"] = v.slope;
        d["N0"] = v.N0;
        out.append(d);
    }
    return out;
}

py::dict ginf_py(const std::string& fixture, int G, int j_max, int d_max) {
    auto rep = ginf_verdict(build_fixture(fixture, 1, G, j_max, 1), d_max);
    py::dict d;
    d["verdict"] = rep.verdict;
    d["exponents"] = rep.exponents;
    d["spread"] = rep.spread;
    return d;
}

std::vector<cplx> apply_py(const std::string& symbol, int G, double eps,
                           const std::vector<cplx>& u) {
    auto a = catalog_symbol(symbol);
    GridSpec spec(a.dim, G);
    if (static_cast<long long>(u.size()) != spec.size())
        throw ValidationError("input size must be G^n");
    std::vector<cplx> out;
    apply_symbol(a, spec, eps, u, out);
    return out;
}

py::list compose_py(const std::string& a, const std::string& b, int r) {
    auto e = expand_compose(catalog_symbol(a), catalog_symbol(b), r);
    py::list out;
    for (auto& t : e.terms) {
        py::dict d;
        d["order"] = t.order;
        d["expr"] = to_sexpr(t.term.expr);
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(pymlg, m) {
    m.doc() = "numerical generalized microlocal analysis";
    m.def("fixture_names", [] {
        std::vector<std::string> names;
        for (auto& f : fixture_catalog()) names.push_back(f.name);
        return names;
    });
    m.def("symbol_names", &symbol_catalog_labels);
    m.def("classify", &classify_py, py::arg("values"), py::arg("j_min") = 1);
    m.def("wavefront", &wavefront_py, py::arg("fixture"), py::arg("dim") = 1,
          py::arg("G") = 128, py::arg("j_max") = 8, py::arg("C") = 8, py::arg("D") = 16,
          py::arg("min_radius") = 0.0, py::arg("seed") = 1);
    m.def("ginf", &ginf_py, py::arg("fixture"), py::arg("G") = 256, py::arg("j_max") = 8,
          py::arg("d_max") = 4);
    m.def("apply_symbol", &apply_py, py::arg("symbol"), py::arg("G"), py::arg("eps"),
          py::arg("u"));
    m.def("compose", &compose_py, py::arg("a"), py::arg("b"), py::arg("r") = 2);
}
