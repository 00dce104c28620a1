#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fsts {
namespace detail {

inline double tricube(double u) {
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

/// Locally weighted polynomial fit of y (sampled at x = 0, 1, ..., n-1)
/// evaluated at an arbitrary position x, which may lie outside [0, n-1]
/// (used to extend cycle-subseries by one period).
///
/// The neighbourhood is the `span` nearest points, tricube-weighted by
/// distance; a span covering the whole series degenerates to a global
/// polynomial fit with uniform neighbourhood weights. Optional robustness
/// weights multiply the neighbourhood weights. Rank-deficient fits fall
/// back to the next lower degree, never error.
inline double loess_fit_at(std::span<const double> y, std::size_t span, int degree,
                           std::span<const double> robustness, double x) {
    const std::size_t n = y.size();
    if (n == 0) return 0.0;
    if (n == 1) return y[0];

    const std::size_t q = std::min(span, n);
    auto ideal = static_cast<long>(std::lround(x - static_cast<double>(q - 1) / 2.0));
    const long left = std::clamp(ideal, 0L, static_cast<long>(n - q));
    const long right = left + static_cast<long>(q) - 1;
    const double h = std::max(x - static_cast<double>(left), static_cast<double>(right) - x);

    std::vector<double> w(q, 0.0);
    double total = 0.0;
    for (long j = left; j <= right; ++j) {
        double wt;
        if (span >= n) {
            wt = 1.0;
        } else {
            const double r = std::abs(static_cast<double>(j) - x);
            if (r <= 0.001 * h)
                wt = 1.0;
            else if (r <= 0.999 * h)
                wt = tricube(r / h);
            else
                wt = 0.0;
        }
        if (!robustness.empty()) wt *= robustness[static_cast<std::size_t>(j)];
        w[static_cast<std::size_t>(j - left)] = wt;
        total += wt;
    }
    if (total <= 0.0) {
        // Every neighbourhood weight vanished; echo the nearest sample.
        const long nearest = std::clamp(static_cast<long>(std::lround(x)), 0L,
                                        static_cast<long>(n - 1));
        return y[static_cast<std::size_t>(nearest)];
    }
    for (double& wt : w) wt /= total;

    for (int deg = std::min(degree, 2); deg >= 1; --deg) {
        if (deg == 2) {
            // Weighted quadratic in (j - x); the fitted value at x is the
            // intercept of the solved system.
            double m[3][3] = {};
            double rhs[3] = {};
            for (std::size_t k = 0; k < q; ++k) {
                const double d = static_cast<double>(left + static_cast<long>(k)) - x;
                const double powers[5] = {1.0, d, d * d, d * d * d, d * d * d * d};
                for (int a = 0; a < 3; ++a) {
                    for (int b = 0; b < 3; ++b) m[a][b] += w[k] * powers[a + b];
                    rhs[a] += w[k] * powers[a] * y[static_cast<std::size_t>(left) + k];
                }
            }
            // Gaussian elimination with partial pivoting on the 3x3 system.
            int idx[3] = {0, 1, 2};
            bool singular = false;
            for (int col = 0; col < 3 && !singular; ++col) {
                int piv = col;
                for (int r = col + 1; r < 3; ++r)
                    if (std::abs(m[idx[r]][col]) > std::abs(m[idx[piv]][col])) piv = r;
                std::swap(idx[col], idx[piv]);
                if (std::abs(m[idx[col]][col]) < 1e-12) {
                    singular = true;
                    break;
                }
                for (int r = col + 1; r < 3; ++r) {
                    const double f = m[idx[r]][col] / m[idx[col]][col];
                    for (int c = col; c < 3; ++c) m[idx[r]][c] -= f * m[idx[col]][c];
                    rhs[idx[r]] -= f * rhs[idx[col]];
                }
            }
            if (!singular) {
                double sol[3];
                for (int r = 2; r >= 0; --r) {
                    double acc = rhs[idx[r]];
                    for (int c = r + 1; c < 3; ++c) acc -= m[idx[r]][c] * sol[c];
                    sol[r] = acc / m[idx[r]][r];
                }
                return sol[0];
            }
            continue; // fall back to the local line
        }
        // deg == 1: slope-adjusted weights (equivalent to the weighted
        // least-squares line evaluated at x).
        double center = 0.0;
        for (std::size_t k = 0; k < q; ++k)
            center += w[k] * static_cast<double>(left + static_cast<long>(k));
        double spread = 0.0;
        for (std::size_t k = 0; k < q; ++k) {
            const double d = static_cast<double>(left + static_cast<long>(k)) - center;
            spread += w[k] * d * d;
        }
        if (std::sqrt(spread) <= 0.001 * static_cast<double>(n - 1)) continue;
        const double slope_factor = (x - center) / spread;
        double fit = 0.0;
        for (std::size_t k = 0; k < q; ++k) {
            const double d = static_cast<double>(left + static_cast<long>(k)) - center;
            fit += w[k] * (1.0 + slope_factor * d) * y[static_cast<std::size_t>(left) + k];
        }
        return fit;
    }

    double fit = 0.0;
    for (std::size_t k = 0; k < q; ++k) fit += w[k] * y[static_cast<std::size_t>(left) + k];
    return fit;
}

} // namespace detail

/// Loess smoothing of an equally spaced sequence: the locally weighted
/// polynomial fit evaluated at every index. span must be odd and >= 3;
/// degree in {0, 1, 2}; optional non-negative robustness weights.
inline std::vector<double> loess_smooth(std::span<const double> y, std::size_t span, int degree,
                                        std::span<const double> weights = {}) {
    if (span < 3 || span % 2 == 0)
        throw std::invalid_argument("loess_smooth: span must be odd and >= 3");
    if (degree < 0 || degree > 2)
        throw std::invalid_argument("loess_smooth: degree must be 0, 1 or 2");
    if (!weights.empty()) {
        if (weights.size() != y.size())
            throw std::invalid_argument("loess_smooth: weights length mismatch");
        for (double w : weights)
            if (!(w >= 0.0)) throw std::invalid_argument("loess_smooth: negative weight");
    }
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] = detail::loess_fit_at(y, span, degree, weights, static_cast<double>(i));
    return out;
}

} // namespace fsts
