#include "mlg/nets.hpp"

#include <algorithm>

namespace mlg {

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    size_t n = xs.size();
    if (n < 2) throw DegenerateFit("need at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double den = n * sxx - sx * sx;
    if (den == 0) throw DegenerateFit("degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, ybar = sy / n;
    for (size_t i = 0; i < n; ++i) {
        double r = ys[i] - (f.slope * xs[i] + f.intercept);
        ss_res += r * r;
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    f.r_squared = ss_tot == 0 ? 1.0 : std::max(0.0, 1.0 - ss_res / ss_tot);
    return f;
}

NetSample make_net(const EpsilonGrid& grid, std::vector<double> values) {
    if (static_cast<int>(values.size()) != grid.count())
        throw ValidationError("value count does not match grid");
    NetSample s;
    s.grid = grid;
    s.floored.assign(values.size(), false);
    for (size_t i = 0; i < values.size(); ++i) {
        double v = values[i];
        if (!std::isfinite(v)) throw NonFinite("net value not finite");
        if (v < 0) v = -v;
        if (v == 0.0) {
            v = kNetFloor;
            s.floored[i] = true;
        }
        values[i] = v;
    }
    s.values = std::move(values);
    return s;
}

NetSample sample_net(const std::function<double(double)>& f, const EpsilonGrid& grid) {
    std::vector<double> vals(grid.count());
    for (int i = 0; i < grid.count(); ++i) {
        double v = f(grid.eps(i));
        if (!std::isfinite(v)) throw NonFinite("net evaluation not finite");
        vals[i] = std::abs(v);
    }
    return make_net(grid, std::move(vals));
}

GrowthFit fit_growth_exponent(const NetSample& s, double tail_fraction) {
    int n = static_cast<int>(s.values.size());
    int tail = static_cast<int>(std::ceil(tail_fraction * n));
    tail = std::min(std::max(tail, 1), n);
    int start = n - tail;

    GrowthFit g;
    g.tail_fraction = tail_fraction;

    bool all_floor = true, any_floor = false;
    for (int i = start; i < n; ++i) {
        all_floor = all_floor && s.floored[i];
        any_floor = any_floor || s.floored[i];
    }
    if (all_floor) {
        g.all_floored = true;
        g.slope = -std::numeric_limits<double>::infinity();
        g.r_squared = 1.0;
        return g;
    }
    std::vector<double> xs, ys;
    for (int i = start; i < n; ++i) {
        if (s.floored[i]) continue;  // mixed case: fit on usable points only
        xs.push_back(s.grid.j(i));
        ys.push_back(std::log2(s.values[i]));
    }
    if (xs.size() < 3) throw DegenerateFit("fewer than 3 usable tail points");
    LineFit lf = fit_line(xs, ys);
    g.slope = lf.slope;
    g.intercept = lf.intercept;
    g.r_squared = lf.r_squared;
    (void)any_floor;
    return g;
}

static bool negligible_ratio_test(const NetSample& s, int q_max, double tail_fraction) {
    // f(eps_j) / eps_j^q non-increasing on the tail for every integer q <= q_max.
    int n = static_cast<int>(s.values.size());
    int tail = std::min(std::max(static_cast<int>(std::ceil(tail_fraction * n)), 2), n);
    int start = n - tail;
    for (int q = 1; q <= q_max; ++q) {
        for (int i = start + 1; i < n; ++i) {
            if (s.floored[i]) continue;  // at the floor counts as decreased
            double prev = std::log2(s.values[i - 1]) + q * s.grid.j(i - 1);
            double cur = std::log2(s.values[i]) + q * s.grid.j(i);
            if (cur > prev + 1e-9) return false;
        }
    }
    return true;
}

ScaleClass classify_scale(const NetSample& s, const Thresholds& th) {
    ScaleClass c;
    if (s.all_floored()) {
        c.tag = ScaleTag::Negligible;
        c.fit.all_floored = true;
        c.fit.slope = -std::numeric_limits<double>::infinity();
        return c;
    }
    bool negligible = negligible_ratio_test(
        s, static_cast<int>(th.negligible_min_slope), th.tail_fraction);
    try {
        c.fit = fit_growth_exponent(s, th.tail_fraction);
    } catch (const DegenerateFit&) {
        if (negligible) {
            c.tag = ScaleTag::Negligible;
            return c;
        }
        throw;
    }
    if (negligible) {
        c.tag = ScaleTag::Negligible;
        return c;
    }
    bool has_floor = false;
    for (bool f : s.floored) has_floor = has_floor || f;
    if (c.fit.slope <= th.slow_slope && !has_floor && s.min_value() > 0) {
        c.tag = ScaleTag::SlowScale;
        return c;
    }
    if (c.fit.slope <= th.moderate_max_slope) {
        c.tag = ScaleTag::Moderate;
        c.exponent = c.fit.slope;
        return c;
    }
    c.tag = ScaleTag::Unbounded;
    return c;
}

bool is_negligible_vs(const NetSample& s, int q_max) {
    if (s.all_floored()) return true;
    GrowthFit g;
    try {
        g = fit_growth_exponent(s);
    } catch (const DegenerateFit&) {
        return true;  // nearly everything at the floor
    }
    if (g.all_floored) return true;
    return -g.slope >= q_max && g.r_squared >= 0.8;
}

}  // namespace mlg
