#pragma once

// Seeded data generators shared by the test suites. Determinism matters
// within a platform only: every frozen expectation in the tests comes from
// a closed form or an independent oracle, never from a particular draw.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace testgen {

inline std::vector<double> normal(std::uint64_t seed, std::size_t n, double mean = 0.0,
                                  double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(mean, sd);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

inline std::vector<double> uniform(std::uint64_t seed, std::size_t n, double lo = 0.0,
                                   double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

inline std::vector<double> exponential(std::uint64_t seed, std::size_t n, double rate = 1.0) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> dist(rate);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

inline std::vector<double> student_t3(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::student_t_distribution<double> dist(3.0);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

/// Equal-weight mixture of N(-center, width^2) and N(center, width^2).
inline std::vector<double> bimodal(std::uint64_t seed, std::size_t n, double center = 3.0,
                                   double width = 0.5) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, width);
    std::bernoulli_distribution side(0.5);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng) + (side(rng) ? center : -center);
    return out;
}

/// Stationary AR(1): x_t = phi x_{t-1} + e_t, e ~ N(0, innovation_sd^2),
/// started from the marginal distribution.
inline std::vector<double> ar1(std::uint64_t seed, std::size_t n, double phi,
                               double innovation_sd) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, innovation_sd);
    std::vector<double> out(n);
    const double marginal_sd = innovation_sd / std::sqrt(1.0 - phi * phi);
    std::normal_distribution<double> start(0.0, marginal_sd);
    out[0] = start(rng);
    for (std::size_t i = 1; i < n; ++i) out[i] = phi * out[i - 1] + noise(rng);
    return out;
}

/// Hourly pollutant-like series: diurnal cycle + slow trend + AR noise.
inline std::vector<double> diurnal_series(std::uint64_t seed, std::size_t n, double cycle_amp,
                                          double noise_sd, double phi = 0.6,
                                          double level = 30.0, double trend_per_step = 0.0) {
    auto noise = ar1(seed, n, phi, noise_sd * std::sqrt(1.0 - phi * phi));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(i % 24) / 24.0;
        out[i] = level + cycle_amp * std::sin(phase) + trend_per_step * static_cast<double>(i) +
                 noise[i];
    }
    return out;
}

} // namespace testgen
