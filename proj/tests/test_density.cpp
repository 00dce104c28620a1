#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fsts/infoplane.hpp"
#include "fsts/kde.hpp"
#include "support/generators.hpp"

using namespace fsts;

namespace {

double trapezoid_integral(const std::vector<double>& v, double spacing) {
    double acc = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += v[i];
    return acc * spacing;
}

} // namespace

TEST_CASE("sj_bandwidth: scale equivariance") {
    auto x = testgen::normal(401, 500);
    const double h = sj_bandwidth(x);
    for (double c : {0.01, 0.5, 3.7, 1000.0}) {
        std::vector<double> scaled(x);
        for (double& v : scaled) v *= c;
        const double hs = sj_bandwidth(scaled);
        REQUIRE(std::abs(hs - c * h) <= 1e-12 * c * h);
    }
    // translation drops out entirely
    std::vector<double> shifted(x);
    for (double& v : shifted) v += 1000.0;
    CHECK(sj_bandwidth(shifted) == Catch::Approx(h).epsilon(1e-9));
}

TEST_CASE("sj_bandwidth: close to the normal-reference value on Gaussian data") {
    // For N(0,1) the AMISE-optimal Gaussian-kernel bandwidth is
    // (4/3)^(1/5) n^(-1/5) = 1.059 n^(-1/5); SJ converges to it.
    const std::size_t n = 10000;
    const double reference = 1.059 * std::pow(static_cast<double>(n), -0.2);
    auto x = testgen::normal(402, n);
    const double h = sj_bandwidth(x);
    CHECK(h > 0.85 * reference);
    CHECK(h < 1.15 * reference);
}

TEST_CASE("sj_bandwidth: degenerate samples rejected") {
    std::vector<double> flat(100, 3.25);
    CHECK_THROWS_AS(sj_bandwidth(flat), degenerate_sample);
    std::vector<double> single = {1.0};
    CHECK_THROWS_AS(sj_bandwidth(single), degenerate_sample);
}

TEST_CASE("select_bandwidth falls back to Silverman and says so") {
    auto x = testgen::normal(403, 2000);
    auto ok = select_bandwidth(x);
    CHECK_FALSE(ok.fallback);
    CHECK(ok.bandwidth == Catch::Approx(sj_bandwidth(x)));

    // The plug-in recursion overflows once scale^9 leaves double range
    // (badly scaled units); Silverman's rule still produces a usable h.
    auto nasty = testgen::normal(404, 500);
    for (double& v : nasty) v *= 1e40;
    CHECK_THROWS_AS(sj_bandwidth(nasty), bandwidth_failure);
    auto fb = select_bandwidth(nasty);
    CHECK(fb.fallback);
    CHECK(fb.bandwidth == Catch::Approx(silverman_bandwidth(nasty)));
    CHECK(fb.bandwidth > 0.0);
    CHECK(std::isfinite(fb.bandwidth));
}

TEST_CASE("kde_pdf: single bump peak") {
    density_model m{{0.0}, 1.0};
    CHECK(kde_pdf(m, 0.0) == Catch::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("kde_pdf: two-point direct evaluation") {
    density_model m{{-1.0, 1.0}, 1.0};
    const double expected = std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi);
    CHECK(kde_pdf(m, 0.0) == Catch::Approx(expected).epsilon(1e-12));
    CHECK(kde_pdf(m, 0.0) == Catch::Approx(0.241971).margin(1e-6));
}

TEST_CASE("kde_pdf integrates to one over the padded grid") {
    std::mt19937_64 rng(404);
    for (int round = 0; round < 20; ++round) {
        const std::size_t n = 50 + rng() % 400;
        auto sample = testgen::normal(rng(), n, 0.0, 0.5 + (round % 5));
        density_model m{sample, select_bandwidth(sample).bandwidth};
        auto grid = make_grid(m);
        auto eval = evaluate_on_grid(m, grid);
        CHECK(trapezoid_integral(eval.pdf, grid.spacing()) == Catch::Approx(1.0).margin(1e-6));
        for (double f : eval.pdf) REQUIRE(f >= 0.0);
    }
}

TEST_CASE("kde_pdf_deriv: symmetry and single-term value") {
    density_model sym{{-1.0, 1.0}, 1.0};
    CHECK(kde_pdf_deriv(sym, 0.0) == Catch::Approx(0.0).margin(1e-15));

    density_model single{{0.0}, 1.0};
    const double expected = -std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi);
    CHECK(kde_pdf_deriv(single, 1.0) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kde_pdf_deriv matches central finite differences") {
    std::mt19937_64 rng(405);
    std::uniform_real_distribution<double> pick(-4.0, 4.0);
    for (int round = 0; round < 40; ++round) {
        auto sample = testgen::normal(rng(), 100 + rng() % 200);
        density_model m{sample, select_bandwidth(sample).bandwidth};
        for (int trial = 0; trial < 5; ++trial) {
            const double x = pick(rng);
            const double step = 1e-5 * m.bandwidth;
            const double fd = (kde_pdf(m, x + step) - kde_pdf(m, x - step)) / (2.0 * step);
            const double analytic = kde_pdf_deriv(m, x);
            const double scale = std::max(std::abs(analytic), std::abs(fd));
            if (scale < 1e-12) continue; // both effectively zero in a far tail
            REQUIRE(std::abs(analytic - fd) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("make_grid pads the sample range by eight bandwidths") {
    density_model a{{0.0}, 1.0};
    auto g = make_grid(a, 3);
    CHECK(g.lo == Catch::Approx(-8.0));
    CHECK(g.hi == Catch::Approx(8.0));
    CHECK(g.m == 3);
    CHECK(g.spacing() == Catch::Approx(8.0));
    CHECK(g.point(1) == Catch::Approx(0.0));

    density_model b{{0.0, 10.0}, 0.5};
    auto g2 = make_grid(b, 4097);
    CHECK(g2.lo == Catch::Approx(-4.0));
    CHECK(g2.hi == Catch::Approx(14.0));

    CHECK_THROWS_AS(make_grid(a, 1), std::invalid_argument);
}

TEST_CASE("batch grid evaluation matches the scalar functions") {
    auto sample = testgen::normal(406, 300);
    density_model m{sample, select_bandwidth(sample).bandwidth};
    auto grid = make_grid(m, 257);
    auto eval = evaluate_on_grid(m, grid);
    for (std::size_t i = 0; i < grid.m; i += 16) {
        const double x = grid.point(i);
        REQUIRE(eval.pdf[i] == Catch::Approx(kde_pdf(m, x)).margin(1e-15));
        REQUIRE(eval.deriv[i] == Catch::Approx(kde_pdf_deriv(m, x)).margin(1e-15));
    }
}

TEST_CASE("grid evaluation is identical for any worker count") {
    auto sample = testgen::normal(407, 2000);
    density_model m{sample, select_bandwidth(sample).bandwidth};
    auto grid = make_grid(m, 1024);

    set_max_workers(1);
    auto serial = evaluate_on_grid(m, grid);
    const double h1 = sj_bandwidth(sample);
    set_max_workers(8);
    auto parallel = evaluate_on_grid(m, grid);
    const double h8 = sj_bandwidth(sample);
    set_max_workers(0);

    CHECK(h1 == h8); // bit-identical
    for (std::size_t i = 0; i < grid.m; ++i) {
        REQUIRE(serial.pdf[i] == parallel.pdf[i]);
        REQUIRE(serial.deriv[i] == parallel.deriv[i]);
    }
}
