#pragma once
// Dyadic-grid sampling, log2 regression, and asymptotic scale classification
// of eps-parameterized scalar nets.

#include <functional>
#include <optional>

#include "mlg/common.hpp"

namespace mlg {

struct EpsilonGrid {
    int j_min = 1;
    int j_max = 12;

    EpsilonGrid() = default;
    EpsilonGrid(int jmin, int jmax) : j_min(jmin), j_max(jmax) {
        if (j_min < 1 || j_max - j_min < 5)
            throw ValidationError("EpsilonGrid needs j_min >= 1 and j_max - j_min >= 5");
    }
    int count() const { return j_max - j_min + 1; }
    int j(int i) const { return j_min + i; }
    double eps(int i) const { return std::ldexp(1.0, -(j_min + i)); }
};

// Values of exactly 0 are recorded at a positive sentinel floor.
constexpr double kNetFloor = 4.9406564584124654e-324;  // min positive double

struct NetSample {
    EpsilonGrid grid;
    std::vector<double> values;        // nonnegative, floored
    std::vector<bool> floored;         // true where original value was 0

    bool all_floored() const {
        for (bool f : floored)
            if (!f) return false;
        return !floored.empty();
    }
    double min_value() const {
        double m = values.empty() ? 0.0 : values[0];
        for (double v : values) m = std::min(m, v);
        return m;
    }
};

struct GrowthFit {
    double slope = 0.0;       // N in f(eps) ~ eps^(-N)
    double intercept = 0.0;
    double r_squared = 0.0;
    double tail_fraction = 0.5;
    bool all_floored = false; // every tail value at the sentinel (decay beyond range)
};

enum class ScaleTag { SlowScale, Moderate, Negligible, Unbounded };

struct ScaleClass {
    ScaleTag tag = ScaleTag::Moderate;
    std::optional<double> exponent;  // present for Moderate
    GrowthFit fit;
};

inline const char* scale_tag_name(ScaleTag t) {
    switch (t) {
        case ScaleTag::SlowScale: return "SlowScale";
        case ScaleTag::Moderate: return "Moderate";
        case ScaleTag::Negligible: return "Negligible";
        case ScaleTag::Unbounded: return "Unbounded";
    }
    return "?";
}

NetSample sample_net(const std::function<double(double)>& f, const EpsilonGrid& grid);
NetSample make_net(const EpsilonGrid& grid, std::vector<double> values);

GrowthFit fit_growth_exponent(const NetSample& s, double tail_fraction = 0.5);

ScaleClass classify_scale(const NetSample& s,
                          const Thresholds& th = default_thresholds());

bool is_negligible_vs(const NetSample& s, int q_max = 8);

// Least-squares line y = slope*x + intercept; returns {slope, intercept, r2}.
struct LineFit {
    double slope = 0, intercept = 0, r_squared = 0;
};
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace mlg
