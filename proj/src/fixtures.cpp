#include "mlg/fixtures.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace mlg {
namespace {

constexpr double kX0 = kPi / 2 + 0.1;   // primary singular location
constexpr double kY0 = kPi + 0.2;       // secondary location / sheet time

// Normalized periodized Gaussian bump centered at c (1D slice for one eps).
std::vector<cplx> gauss1d(const GridSpec& spec, double c, double eps) {
    std::vector<cplx> u(spec.G);
    double sum = 0;
    for (int m = 0; m < spec.G; ++m) {
        double x = spec.point(m), v = 0;
        for (double s : {-kTwoPi, 0.0, kTwoPi}) {
            double z = (x - c + s) / eps;
            v += std::exp(-0.5 * z * z);
        }
        u[m] = v;
        sum += v;
    }
    double norm = sum * spec.spacing();
    for (auto& v : u) v /= norm;
    return u;
}

std::vector<cplx> gauss2d(const GridSpec& spec, double cx, double cy, double eps) {
    int G = spec.G;
    std::vector<cplx> u(static_cast<size_t>(G) * G);
    double sum = 0;
    for (int i = 0; i < G; ++i) {
        double x = spec.point(i);
        for (int j = 0; j < G; ++j) {
            double y = spec.point(j), v = 0;
            for (double sx : {-kTwoPi, 0.0, kTwoPi})
                for (double sy : {-kTwoPi, 0.0, kTwoPi}) {
                    double zx = (x - cx + sx) / eps, zy = (y - cy + sy) / eps;
                    v += std::exp(-0.5 * (zx * zx + zy * zy));
                }
            u[static_cast<size_t>(i) * G + j] = v;
            sum += v;
        }
    }
    double norm = sum * spec.spacing() * spec.spacing();
    for (auto& v : u) v /= norm;
    return u;
}

// Smoothed indicator of [kX0, kX0 + pi) along one axis.
double heav_profile(double x, double eps) {
    double v = 0;
    for (double s : {-kTwoPi, 0.0, kTwoPi})
        v += 0.5 * (std::erf((x - kX0 + s) / (std::sqrt(2.0) * eps)) -
                    std::erf((x - kX0 - kPi + s) / (std::sqrt(2.0) * eps)));
    return v;
}

std::vector<cplx> heav1d(const GridSpec& spec, double eps) {
    std::vector<cplx> u(spec.G);
    for (int m = 0; m < spec.G; ++m) u[m] = heav_profile(spec.point(m), eps);
    return u;
}

std::vector<cplx> heav2d(const GridSpec& spec, double eps) {
    int G = spec.G;
    std::vector<cplx> u(static_cast<size_t>(G) * G);
    for (int i = 0; i < G; ++i) {
        double v = heav_profile(spec.point(i), eps);
        for (int j = 0; j < G; ++j) u[static_cast<size_t>(i) * G + j] = v;
    }
    return u;
}

std::vector<cplx> lorentz1d(const GridSpec& spec, double c) {
    std::vector<cplx> u(spec.G);
    for (int m = 0; m < spec.G; ++m) {
        double z = spec.point(m) - kPi;
        u[m] = 1.0 / (1.0 + c * z * z);
    }
    return u;
}

// Sheet fixtures live on a 2D grid with x = axis 0 and t = axis 1.
std::vector<cplx> sheet_transport(const GridSpec& spec, double eps) {
    int G = spec.G;
    std::vector<cplx> u(static_cast<size_t>(G) * G);
    double amp = 1.0 / (eps * std::sqrt(kTwoPi));
    for (int i = 0; i < G; ++i) {
        double x = spec.point(i);
        for (int j = 0; j < G; ++j) {
            double t = spec.point(j), v = 0;
            for (double s : {-2 * kTwoPi, -kTwoPi, 0.0, kTwoPi, 2 * kTwoPi}) {
                double z = (x - t - kX0 + s) / eps;
                v += std::exp(-0.5 * z * z);
            }
            u[static_cast<size_t>(i) * G + j] = amp * v;
        }
    }
    return u;
}

std::vector<cplx> sheet_conormal(const GridSpec& spec, double eps) {
    int G = spec.G;
    std::vector<cplx> u(static_cast<size_t>(G) * G);
    double amp = 1.0 / (eps * std::sqrt(kTwoPi));
    for (int j = 0; j < G; ++j) {
        double t = spec.point(j), v = 0;
        for (double s : {-kTwoPi, 0.0, kTwoPi}) {
            double z = (t - kY0 + s) / eps;
            v += std::exp(-0.5 * z * z);
        }
        for (int i = 0; i < G; ++i) u[static_cast<size_t>(i) * G + j] = amp * v;
    }
    return u;
}

GridFunctionFamily assemble(const GridSpec& spec, const EpsilonGrid& grid,
                            const std::string& label,
                            const std::function<std::vector<cplx>(double)>& slice) {
    GridFunctionFamily u;
    u.spec = spec;
    u.eps_grid = grid;
    u.label = label;
    for (int ji = 0; ji < grid.count(); ++ji) u.data.push_back(slice(grid.eps(ji)));
    u.validate();
    return u;
}

void need_dim(const GridSpec& spec, int n, const std::string& name) {
    if (spec.n != n)
        throw ValidationError("fixture '" + name + "' needs dimension " + std::to_string(n));
}

}  // namespace

std::vector<FixtureInfo> fixture_catalog() {
    return {
        {"delta", 1, "normalized Gaussian approximation of a point mass"},
        {"delta2d", 2, "2D normalized Gaussian point mass"},
        {"two_deltas", 1, "point masses at two antipodal locations"},
        {"heaviside", 1, "smoothed indicator of a half interval"},
        {"heaviside2d", 2, "smoothed indicator sheet, jump along axis 0"},
        {"plane_wave", 1, "e^{i 8 x}, eps-independent"},
        {"sin", 1, "sin(x), eps-independent"},
        {"one", 1, "constant 1"},
        {"slow_lorentz", 1, "1/(1 + c_eps (x-pi)^2), c_eps = 1 + log2(1/eps)"},
        {"fast_lorentz", 1, "1/(1 + c_eps (x-pi)^2), c_eps = 1/eps"},
        {"transport_sheet", 2, "Gaussian ridge along x = t + x0 (x, t) plane"},
        {"conormal_sheet", 2, "Gaussian ridge along t = t0, conormal in time"},
        {"random_bandlimited", 1, "seeded trig polynomial with |k| <= 8"},
    };
}

std::vector<cplx> random_bandlimited(const GridSpec& spec, int kmax, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<cplx> hat(spec.size(), cplx(0, 0));
    if (spec.n == 1) {
        for (int k = -kmax; k <= kmax; ++k) {
            int idx = (k + spec.G) % spec.G;
            hat[idx] = cplx(dist(rng), dist(rng));
        }
    } else {
        for (int k0 = -kmax; k0 <= kmax; ++k0)
            for (int k1 = -kmax; k1 <= kmax; ++k1) {
                size_t idx = static_cast<size_t>((k0 + spec.G) % spec.G) * spec.G +
                             (k1 + spec.G) % spec.G;
                hat[idx] = cplx(dist(rng), dist(rng));
            }
    }
    std::vector<cplx> u;
    fft_inverse(spec, hat, u);
    return u;
}

GridFunctionFamily make_fixture(const std::string& name, const GridSpec& spec,
                                const EpsilonGrid& grid, uint64_t seed) {
    if (name == "delta") {
        need_dim(spec, 1, name);
        return assemble(spec, grid, name, [&](double e) { return gauss1d(spec, kX0, e); });
    }
    if (name == "delta2d") {
        need_dim(spec, 2, name);
        return assemble(spec, grid, name, [&](double e) { return gauss2d(spec, kX0, kY0, e); });
    }
    if (name == "two_deltas") {
        need_dim(spec, 1, name);
        return assemble(spec, grid, name, [&](double e) {
            auto a = gauss1d(spec, kX0, e);
            auto b = gauss1d(spec, kX0 + kPi, e);
            for (int m = 0; m < spec.G; ++m) a[m] += b[m];
            return a;
        });
    }
    if (name == "heaviside") {
        need_dim(spec, 1, name);
        return assemble(spec, grid, name, [&](double e) { return heav1d(spec, e); });
    }
    if (name == "heaviside2d") {
        need_dim(spec, 2, name);
        return assemble(spec, grid, name, [&](double e) { return heav2d(spec, e); });
    }
    if (name == "plane_wave") {
        need_dim(spec, 1, name);
        return assemble(spec, grid, name, [&](double) {
            std::vector<cplx> u(spec.G);
            for (int m = 0; m < spec.G; ++m)
                u[m] = std::exp(cplx(0, 8.0 * spec.point(m)));
            return u;
        });
    }
    if (name == "sin") {
        need_dim(spec, 1, name);
        return assemble(spec, grid, name, [&](double) {
            std::vector<cplx> u(spec.G);
            for (int m = 0; m < spec.G; ++m) u[m] = std::sin(spec.point(m));
            return u;
        });
    }
    if (name == "one") {
        need_dim(spec, 1, name);
        return assemble(spec, grid, name,
                        [&](double) { return std::vector<cplx>(spec.G, cplx(1, 0)); });
    }
    if (name == "slow_lorentz") {
        need_dim(spec, 1, name);
        return assemble(spec, grid, name,
                        [&](double e) { return lorentz1d(spec, 1.0 + std::log2(1.0 / e)); });
    }
    if (name == "fast_lorentz") {
        need_dim(spec, 1, name);
        return assemble(spec, grid, name, [&](double e) { return lorentz1d(spec, 1.0 / e); });
    }
    if (name == "transport_sheet") {
        need_dim(spec, 2, name);
        return assemble(spec, grid, name, [&](double e) { return sheet_transport(spec, e); });
    }
    if (name == "conormal_sheet") {
        need_dim(spec, 2, name);
        return assemble(spec, grid, name, [&](double e) { return sheet_conormal(spec, e); });
    }
    if (name == "random_bandlimited") {
        auto slice = random_bandlimited(spec, 8, seed);
        return assemble(spec, grid, name, [&](double) { return slice; });
    }
    throw ValidationError("unknown fixture '" + name + "'");
}

}  // namespace mlg
