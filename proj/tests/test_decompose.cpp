#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fsts/loess.hpp"
#include "fsts/stl.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace fsts;

TEST_CASE("loess reproduces constants") {
    std::vector<double> y(5, 5.0);
    for (int degree : {0, 1, 2}) {
        for (std::size_t span : {3u, 5u, 7u}) {
            auto out = loess_smooth(y, span, degree);
            for (double v : out) CHECK(v == Catch::Approx(5.0).margin(1e-12));
        }
    }
}

TEST_CASE("degree-1 loess is exact on lines") {
    std::vector<double> y(41);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 3.0 - 0.25 * static_cast<double>(i);
    for (std::size_t span : {3u, 9u, 41u}) {
        auto out = loess_smooth(y, span, 1);
        for (std::size_t i = 0; i < y.size(); ++i)
            CHECK(out[i] == Catch::Approx(y[i]).margin(1e-9));
    }
}

TEST_CASE("full-span degree-1 loess equals the least-squares line") {
    auto noise = testgen::normal(31, 51);
    std::vector<double> y(51);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 17.0) + noise[i];
    auto fitted = loess_smooth(y, 51, 1);
    const auto line = oracle::least_squares_line(y);
    for (std::size_t i = 0; i < y.size(); ++i)
        CHECK(fitted[i] ==
              Catch::Approx(line.intercept + line.slope * static_cast<double>(i)).margin(1e-9));
}

TEST_CASE("degree-2 loess is exact on quadratics") {
    std::vector<double> y(31);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double x = static_cast<double>(i);
        y[i] = 0.5 * x * x - 3.0 * x + 7.0;
    }
    for (std::size_t span : {5u, 11u, 31u}) {
        auto out = loess_smooth(y, span, 2);
        for (std::size_t i = 0; i < y.size(); ++i)
            REQUIRE(out[i] == Catch::Approx(y[i]).margin(1e-7));
    }
}

TEST_CASE("loess robustness weights suppress flagged points") {
    std::vector<double> y = {0.0, 0.0, 100.0, 0.0, 0.0};
    std::vector<double> w = {1.0, 1.0, 0.0, 1.0, 1.0};
    auto out = loess_smooth(y, 5, 0, w);
    for (double v : out) CHECK(v == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("loess argument validation") {
    std::vector<double> y = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(loess_smooth(y, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(loess_smooth(y, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(loess_smooth(y, 3, 3), std::invalid_argument);
    std::vector<double> bad_w = {1.0, -1.0, 1.0};
    CHECK_THROWS_AS(loess_smooth(y, 3, 1, bad_w), std::invalid_argument);
}

TEST_CASE("stl recovers a sinusoid plus trend") {
    const std::size_t n = 2400;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = 10.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 24.0) +
               0.01 * static_cast<double>(i);
    auto d = stl_decompose(y, stl_params{});
    double rms = 0.0;
    for (double r : d.remainder) rms += r * r;
    rms = std::sqrt(rms / static_cast<double>(n));
    CHECK(rms < 0.05 * 10.0); // remainder is small relative to the cycle amplitude
}

TEST_CASE("stl leaves white noise in the remainder") {
    const std::size_t n = 2400;
    auto y = testgen::normal(97, n, 0.0, 2.0);
    auto d = stl_decompose(y, stl_params{});
    auto variance = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double acc = 0.0;
        for (double x : v) acc += (x - mean) * (x - mean);
        return acc / static_cast<double>(v.size());
    };
    CHECK(variance(d.remainder) >= 0.8 * variance(y));
}

TEST_CASE("stl additive identity holds componentwise") {
    auto y = testgen::diurnal_series(5, 600, 8.0, 2.0);
    double max_abs = 0.0;
    for (double v : y) max_abs = std::max(max_abs, std::abs(v));
    for (std::size_t outer : {0u, 2u}) {
        stl_params params;
        params.outer_iterations = outer;
        auto d = stl_decompose(y, params);
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double rebuilt = d.trend[i] + d.seasonal[i] + d.remainder[i];
            REQUIRE(std::abs(rebuilt - y[i]) <= 1e-9 * max_abs);
        }
    }
}

TEST_CASE("periodic window gives an exactly periodic seasonal component") {
    auto y = testgen::diurnal_series(6, 720, 5.0, 1.5);
    auto d = stl_decompose(y, stl_params{});
    for (std::size_t i = 0; i + 24 < y.size(); ++i)
        REQUIRE(std::abs(d.seasonal[i] - d.seasonal[i + 24]) <= 1e-9);
}

TEST_CASE("stl is shift-equivariant in level") {
    auto y = testgen::diurnal_series(8, 480, 6.0, 1.0);
    auto base = stl_decompose(y, stl_params{});
    const double shift = 250.0;
    std::vector<double> shifted(y);
    for (double& v : shifted) v += shift;
    auto moved = stl_decompose(shifted, stl_params{});
    double scale = 0.0;
    for (double v : shifted) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < y.size(); ++i) {
        REQUIRE(std::abs(moved.trend[i] - (base.trend[i] + shift)) <= 1e-9 * scale);
        REQUIRE(std::abs(moved.seasonal[i] - base.seasonal[i]) <= 1e-9 * scale);
        REQUIRE(std::abs(moved.remainder[i] - base.remainder[i]) <= 1e-9 * scale);
    }
}

TEST_CASE("stl rejects short series and bad parameters") {
    std::vector<double> y(40, 1.0);
    CHECK_THROWS_AS(stl_decompose(y, stl_params{}), series_too_short); // needs 48 for period 24

    stl_params even_window;
    even_window.seasonal_window = 8;
    CHECK_THROWS_AS(stl_decompose(std::vector<double>(100, 1.0), even_window),
                    std::invalid_argument);

    stl_params bad_period;
    bad_period.period = 1;
    CHECK_THROWS_AS(stl_decompose(std::vector<double>(100, 1.0), bad_period),
                    std::invalid_argument);
}

TEST_CASE("stl with a numeric seasonal window tracks a drifting cycle") {
    // Amplitude modulation is representable with a finite seasonal window
    // but not with the periodic sentinel.
    const std::size_t n = 24 * 60;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double amp = 5.0 + 4.0 * static_cast<double>(i) / static_cast<double>(n);
        y[i] = amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 24.0);
    }
    stl_params params;
    params.seasonal_window = 11;
    auto d = stl_decompose(y, params);
    double rms = 0.0;
    for (double r : d.remainder) rms += r * r;
    rms = std::sqrt(rms / static_cast<double>(n));
    CHECK(rms < 0.5);

    stl_params fixed;
    auto d_fixed = stl_decompose(y, fixed);
    double rms_fixed = 0.0;
    for (double r : d_fixed.remainder) rms_fixed += r * r;
    rms_fixed = std::sqrt(rms_fixed / static_cast<double>(n));
    CHECK(rms < rms_fixed); // the adaptive window must do strictly better here
}

TEST_CASE("stl robustness iterations tame a heavy outlier") {
    auto y = testgen::diurnal_series(12, 720, 6.0, 0.5);
    y[360] += 500.0;
    stl_params robust;
    robust.outer_iterations = 2;
    auto d = stl_decompose(y, robust);
    // The outlier should stay in the remainder, not bend the trend.
    double max_trend_jump = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i)
        max_trend_jump = std::max(max_trend_jump, std::abs(d.trend[i] - d.trend[i - 1]));
    CHECK(max_trend_jump < 5.0);
    CHECK(std::abs(d.remainder[360]) > 400.0);
}

TEST_CASE("stl requires gap-free time series input") {
    time_series ts;
    ts.id = "gappy";
    ts.origin = 0;
    ts.step = 3600;
    ts.values.assign(100, 1.0);
    ts.missing.assign(100, 0);
    ts.missing[10] = 1;
    CHECK_THROWS_AS(stl_decompose(ts, stl_params{}), malformed_input);
}
