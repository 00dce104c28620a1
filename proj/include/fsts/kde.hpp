#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsts/errors.hpp"
#include "fsts/parallel.hpp"

namespace fsts {

/// Fitted Gaussian kernel density estimate: the sample plus a bandwidth.
/// The kernel is fixed (standard normal).
struct density_model {
    std::vector<double> sample;
    double bandwidth = 0.0;
};

/// Uniform evaluation grid with m points spanning [lo, hi].
struct eval_grid {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t m = 0;

    double spacing() const { return (hi - lo) / static_cast<double>(m - 1); }
    double point(std::size_t i) const {
        return lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(m - 1));
    }
};

namespace detail {

inline constexpr double sqrt_2pi = 2.5066282746310002; // sqrt(2*pi)

// exp(-t) underflows to exactly 0.0 past this point, so skipping the call
// does not change the sum.
inline constexpr double exp_underflow = 750.0;

inline void check_model(const density_model& model) {
    if (model.sample.empty()) throw std::invalid_argument("density_model: empty sample");
    if (!(model.bandwidth > 0.0) || !std::isfinite(model.bandwidth))
        throw std::invalid_argument("density_model: bandwidth must be positive and finite");
    for (double v : model.sample)
        if (!std::isfinite(v))
            throw std::invalid_argument("density_model: non-finite sample value");
}

inline double sample_sd(std::span<const double> x) {
    const std::size_t n = x.size();
    kahan_sum mean_acc;
    for (double v : x) mean_acc.add(v);
    const double mean = mean_acc.value() / static_cast<double>(n);
    kahan_sum var_acc;
    for (double v : x) var_acc.add((v - mean) * (v - mean));
    return std::sqrt(var_acc.value() / static_cast<double>(n - 1));
}

// Linear-interpolation quantile (the common "type 7" convention).
inline double quantile_sorted(std::span<const double> sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto idx = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(idx);
    if (idx + 1 >= sorted.size()) return sorted.back();
    return sorted[idx] * (1.0 - frac) + sorted[idx + 1] * frac;
}

/// Robust scale: min(sample sd, IQR / 1.349), ignoring a degenerate IQR.
inline double robust_scale(std::span<const double> x) {
    const double sd = sample_sd(x);
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    if (iqr > 0.0) return std::min(sd, iqr / 1.349);
    return sd;
}

// phi^(4)(u) = (u^4 - 6 u^2 + 3) phi(u), phi^(6)(u) = (u^6 - 15 u^4 + 45 u^2 - 15) phi(u).
template <int Order>
inline double gaussian_derivative(double u) {
    static_assert(Order == 4 || Order == 6);
    const double u2 = u * u;
    const double t = 0.5 * u2;
    if (t > exp_underflow) return 0.0;
    const double phi = std::exp(-t) / sqrt_2pi;
    if constexpr (Order == 4) {
        return (u2 * u2 - 6.0 * u2 + 3.0) * phi;
    } else {
        const double u4 = u2 * u2;
        return (u4 * u2 - 15.0 * u4 + 45.0 * u2 - 15.0) * phi;
    }
}

/// Exact pairwise density-functional estimate
///   psi_r(g) = n^-2 g^-(r+1) sum_ij phi^(r)((x_i - x_j) / g),
/// computed over the upper triangle in fixed blocks so the result does not
/// depend on the worker count.
template <int Order>
inline double pair_functional(std::span<const double> x, double g) {
    const std::size_t n = x.size();
    const double diag = static_cast<double>(n) * gaussian_derivative<Order>(0.0);
    const double off_diag = blocked_sum(n, 128, [&](std::size_t begin, std::size_t end) {
        kahan_sum acc;
        for (std::size_t i = begin; i < end; ++i) {
            const double xi = x[i];
            for (std::size_t j = i + 1; j < n; ++j)
                acc.add(gaussian_derivative<Order>((xi - x[j]) / g));
        }
        return acc.value();
    });
    const double total = diag + 2.0 * off_diag;
    const double gp = std::pow(g, static_cast<double>(Order + 1));
    return total / (static_cast<double>(n) * static_cast<double>(n) * gp);
}

} // namespace detail

/// Silverman's rule of thumb, h = 0.9 * min(sd, IQR/1.349) * n^(-1/5).
inline double silverman_bandwidth(std::span<const double> sample) {
    if (sample.size() < 2) throw degenerate_sample("bandwidth: need at least two samples");
    const double scale = detail::robust_scale(sample);
    if (!(scale > 0.0)) throw degenerate_sample("bandwidth: sample has zero variance");
    return 0.9 * scale * std::pow(static_cast<double>(sample.size()), -0.2);
}

/// Sheather-Jones direct plug-in bandwidth (two stages).
///
/// Stage structure: a normal-reference estimate of the eighth-order density
/// functional seeds a kernel estimate of psi_6, which seeds psi_4, which
/// gives the AMISE-optimal h = (R(K) / (psi_4 n))^(1/5) for the Gaussian
/// kernel (R(K) = 1/(2 sqrt(pi)), mu_2 = 1). The pairwise functional sums
/// are computed exactly, O(n^2). Throws degenerate_sample on zero variance
/// and bandwidth_failure when the recursion loses positivity.
inline double sj_bandwidth(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 2) throw degenerate_sample("sj_bandwidth: need at least two samples");
    for (double v : sample)
        if (!std::isfinite(v))
            throw std::invalid_argument("sj_bandwidth: non-finite sample value");

    const double scale = detail::robust_scale(sample);
    if (!(scale > 0.0)) throw degenerate_sample("sj_bandwidth: sample has zero variance");

    const double nd = static_cast<double>(n);
    const double sqrt_pi = std::sqrt(std::numbers::pi);

    // Normal-reference psi_8, then the two kernel-functional stages.
    const double psi8 = 105.0 / (32.0 * sqrt_pi * std::pow(scale, 9.0));
    // -2 K^(6)(0) = 30 / sqrt(2 pi)
    const double g6 = std::pow(30.0 / (detail::sqrt_2pi * psi8 * nd), 1.0 / 9.0);
    const double psi6 = detail::pair_functional<6>(sample, g6);
    if (!std::isfinite(psi6) || psi6 >= 0.0)
        throw bandwidth_failure("sj_bandwidth: psi_6 estimate lost its sign (psi_6 = " +
                                std::to_string(psi6) + ")");

    // -2 K^(4)(0) = -6 / sqrt(2 pi); psi_6 < 0 keeps the ratio positive.
    const double g4 = std::pow(-6.0 / (detail::sqrt_2pi * psi6 * nd), 1.0 / 7.0);
    const double psi4 = detail::pair_functional<4>(sample, g4);
    if (!std::isfinite(psi4) || psi4 <= 0.0)
        throw bandwidth_failure("sj_bandwidth: psi_4 estimate is not positive (psi_4 = " +
                                std::to_string(psi4) + ")");

    const double h = std::pow(1.0 / (2.0 * sqrt_pi * psi4 * nd), 0.2);
    if (!std::isfinite(h) || h <= 0.0)
        throw bandwidth_failure("sj_bandwidth: non-finite bandwidth");
    return h;
}

struct bandwidth_selection {
    double bandwidth;
    bool fallback; ///< true when Sheather-Jones failed and Silverman's rule was used
};

/// Sheather-Jones with Silverman fallback; the flag is surfaced in output
/// metadata so batch runs stay auditable.
inline bandwidth_selection select_bandwidth(std::span<const double> sample) {
    try {
        return {sj_bandwidth(sample), false};
    } catch (const bandwidth_failure&) {
        return {silverman_bandwidth(sample), true};
    }
}

/// Gaussian KDE density at a point:
///   f_h(x) = (n h sqrt(2 pi))^-1 sum_i exp(-((x - x_i)/h)^2 / 2).
inline double kde_pdf(const density_model& model, double x) {
    detail::check_model(model);
    const double h = model.bandwidth;
    detail::kahan_sum acc;
    for (double xi : model.sample) {
        const double u = (x - xi) / h;
        const double t = 0.5 * u * u;
        if (t > detail::exp_underflow) continue;
        acc.add(std::exp(-t));
    }
    return acc.value() / (static_cast<double>(model.sample.size()) * h * detail::sqrt_2pi);
}

/// Exact derivative of kde_pdf:
///   f'_h(x) = -(n h^3 sqrt(2 pi))^-1 sum_i (x - x_i) exp(-((x - x_i)/h)^2 / 2).
inline double kde_pdf_deriv(const density_model& model, double x) {
    detail::check_model(model);
    const double h = model.bandwidth;
    detail::kahan_sum acc;
    for (double xi : model.sample) {
        const double d = x - xi;
        const double u = d / h;
        const double t = 0.5 * u * u;
        if (t > detail::exp_underflow) continue;
        acc.add(d * std::exp(-t));
    }
    return -acc.value() /
           (static_cast<double>(model.sample.size()) * h * h * h * detail::sqrt_2pi);
}

/// Grid spanning the sample padded by eight bandwidths on each side; the
/// Gaussian tail mass left outside is below double-precision noise.
inline eval_grid make_grid(const density_model& model, std::size_t m = 4096) {
    detail::check_model(model);
    if (m < 2) throw std::invalid_argument("make_grid: need at least two grid points");
    const auto [lo_it, hi_it] = std::minmax_element(model.sample.begin(), model.sample.end());
    return {*lo_it - 8.0 * model.bandwidth, *hi_it + 8.0 * model.bandwidth, m};
}

struct grid_eval {
    std::vector<double> pdf;
    std::vector<double> deriv;
};

/// Evaluates the density and its derivative on every grid point, sharing
/// one exponential per (grid point, sample) pair. Grid points are processed
/// in fixed blocks; each point's sample sum runs in index order, so results
/// are bit-identical for any worker count.
inline grid_eval evaluate_on_grid(const density_model& model, const eval_grid& grid) {
    detail::check_model(model);
    if (grid.m < 2) throw std::invalid_argument("evaluate_on_grid: bad grid");
    const double h = model.bandwidth;
    const double nd = static_cast<double>(model.sample.size());
    const double pdf_norm = 1.0 / (nd * h * detail::sqrt_2pi);
    const double deriv_norm = 1.0 / (nd * h * h * h * detail::sqrt_2pi);

    grid_eval out;
    out.pdf.assign(grid.m, 0.0);
    out.deriv.assign(grid.m, 0.0);
    detail::for_each_block(grid.m, 256, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t g = begin; g < end; ++g) {
            const double x = grid.point(g);
            detail::kahan_sum s0, s1;
            for (double xi : model.sample) {
                const double d = x - xi;
                const double u = d / h;
                const double t = 0.5 * u * u;
                if (t > detail::exp_underflow) continue;
                const double e = std::exp(-t);
                s0.add(e);
                s1.add(d * e);
            }
            out.pdf[g] = s0.value() * pdf_norm;
            out.deriv[g] = -s1.value() * deriv_norm;
        }
    });
    return out;
}

} // namespace fsts
