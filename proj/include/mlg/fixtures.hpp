#pragma once
// Built-in regularized test families on the periodic grid.

#include "mlg/quantize.hpp"

namespace mlg {

struct FixtureInfo {
    std::string name;
    int dim = 1;
    std::string note;
};

// Catalog of built-in fixtures (>= 10 entries).
std::vector<FixtureInfo> fixture_catalog();

// seed only affects the random band-limited fixture.
GridFunctionFamily make_fixture(const std::string& name, const GridSpec& spec,
                                const EpsilonGrid& grid, uint64_t seed = 1);

// eps-independent random trigonometric polynomial with |k| <= kmax.
std::vector<cplx> random_bandlimited(const GridSpec& spec, int kmax, uint64_t seed);

}  // namespace mlg
