#include <doctest.h>

#include "mlg/nets.hpp"

using namespace mlg;

TEST_CASE("pure power slopes are exact") {
    EpsilonGrid g(1, 12);
    for (double N : {0.5, 1.0, 2.0, 5.0}) {
        auto s = sample_net([&](double e) { return std::pow(e, -N); }, g);
        auto c = classify_scale(s);
        CHECK(c.tag == ScaleTag::Moderate);
        REQUIRE(c.exponent.has_value());
        CHECK(std::abs(*c.exponent - N) <= 1e-9);
    }
}

TEST_CASE("constants and logs are slow scale") {
    EpsilonGrid g(1, 40);
    auto lg = [](double e) { return std::log2(1.0 / e); };
    CHECK(classify_scale(sample_net([](double) { return 1.0; }, g)).tag ==
          ScaleTag::SlowScale);
    CHECK(classify_scale(sample_net([&](double e) { return lg(e); }, g)).tag ==
          ScaleTag::SlowScale);
    CHECK(classify_scale(sample_net([&](double e) { return lg(e) * lg(e); }, g)).tag ==
          ScaleTag::SlowScale);
    // product closure
    CHECK(classify_scale(sample_net([&](double e) { return 3.0 * lg(e); }, g)).tag ==
          ScaleTag::SlowScale);
}

TEST_CASE("negligible nets floor and classify") {
    EpsilonGrid g(1, 12);
    auto s = sample_net([](double e) { return std::exp(-1.0 / e); }, g);
    for (int i = 8; i < 12; ++i) CHECK(s.values[i] < 1e-100);
    CHECK(is_negligible_vs(s));
    CHECK(classify_scale(s).tag == ScaleTag::Negligible);
    auto p = sample_net([](double e) { return 1.0 / e; }, g);
    CHECK_FALSE(is_negligible_vs(p));
}

TEST_CASE("decaying powers classify slow scale") {
    EpsilonGrid g(1, 12);
    CHECK(classify_scale(sample_net([](double e) { return std::sqrt(e); }, g)).tag ==
          ScaleTag::SlowScale);
    CHECK(classify_scale(sample_net([](double e) { return e * e; }, g)).tag ==
          ScaleTag::SlowScale);
}

TEST_CASE("fit_line recovers an exact line") {
    std::vector<double> xs = {1, 2, 3, 4}, ys = {3, 5, 7, 9};
    auto f = fit_line(xs, ys);
    CHECK(std::abs(f.slope - 2.0) < 1e-12);
    CHECK(std::abs(f.intercept - 1.0) < 1e-12);
    CHECK(f.r_squared > 1.0 - 1e-12);
}
