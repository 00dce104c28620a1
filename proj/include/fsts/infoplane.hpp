#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "fsts/errors.hpp"
#include "fsts/kde.hpp"
#include "fsts/parallel.hpp"

namespace fsts {

/// One series' position on the Fisher-Shannon plane. sep carries the units
/// of the input variance, fim its inverse; their product is dimensionless
/// and bounded below by 1 (equality only for a Gaussian density).
struct fs_point_result {
    std::string id;
    double sep = 0.0;
    double fim = 0.0;
    double product = 0.0;
    double bandwidth = 0.0;
    std::size_t n = 0;
    bool fallback_bandwidth_used = false;
};

namespace detail {

inline double trapezoid(std::span<const double> values, double spacing) {
    kahan_sum acc;
    acc.add(0.5 * values.front());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) acc.add(values[i]);
    acc.add(0.5 * values.back());
    return acc.value() * spacing;
}

// Densities below tau = 1e-12 * max(f) contribute nothing: the excluded
// region carries negligible mass on the padded grid and this avoids log(0)
// and 0/0 at the extreme tails.
inline double density_cutoff(std::span<const double> pdf) {
    double max_f = 0.0;
    for (double f : pdf) max_f = std::max(max_f, f);
    return 1e-12 * max_f;
}

inline double entropy_from_eval(std::span<const double> pdf, double spacing) {
    const double tau = density_cutoff(pdf);
    kahan_sum acc;
    const std::size_t m = pdf.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double f = pdf[i];
        if (f < tau) continue;
        const double weight = (i == 0 || i == m - 1) ? 0.5 : 1.0;
        acc.add(weight * (-f * std::log(f)));
    }
    const double h = acc.value() * spacing;
    if (!std::isfinite(h))
        throw quadrature_failure("differential_entropy: non-finite result");
    return h;
}

inline double fim_from_eval(std::span<const double> pdf, std::span<const double> deriv,
                            double spacing) {
    const double tau = density_cutoff(pdf);
    kahan_sum acc;
    const std::size_t m = pdf.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double f = pdf[i];
        if (f < tau) continue;
        const double weight = (i == 0 || i == m - 1) ? 0.5 : 1.0;
        acc.add(weight * (deriv[i] * deriv[i] / f));
    }
    const double value = acc.value() * spacing;
    if (!std::isfinite(value)) throw quadrature_failure("fim: non-finite result");
    return value;
}

} // namespace detail

/// Differential entropy -E[log f] of the fitted density, by trapezoidal
/// quadrature of -f log f over the grid.
inline double differential_entropy(const density_model& model, const eval_grid& grid) {
    const auto eval = evaluate_on_grid(model, grid);
    return detail::entropy_from_eval(eval.pdf, grid.spacing());
}

/// Shannon entropy power N = exp(2 H) / (2 pi e). Equals the variance for a
/// Gaussian density.
inline double sep(const density_model& model, const eval_grid& grid) {
    const double h = differential_entropy(model, grid);
    return std::exp(2.0 * h) / (2.0 * std::numbers::pi * std::numbers::e);
}

/// Fisher information with respect to translation: the integral of
/// (f')^2 / f over the grid.
inline double fim(const density_model& model, const eval_grid& grid) {
    const auto eval = evaluate_on_grid(model, grid);
    return detail::fim_from_eval(eval.pdf, eval.deriv, grid.spacing());
}

/// Full per-series estimate: bandwidth selection, density fit, grid
/// construction and the two quadratures. Enforces the isoperimetric lower
/// bound sep * fim >= 1 - 1e-6; a violation signals a quadrature or grid
/// defect rather than a property of the data.
inline fs_point_result fs_point(std::string_view id, std::span<const double> remainder,
                                std::size_t grid_points = 4096) {
    for (double v : remainder)
        if (!std::isfinite(v))
            throw std::invalid_argument("fs_point: non-finite value in series '" +
                                        std::string(id) + "'");

    const auto bw = select_bandwidth(remainder);
    density_model model{std::vector<double>(remainder.begin(), remainder.end()), bw.bandwidth};
    const eval_grid grid = make_grid(model, grid_points);
    const auto eval = evaluate_on_grid(model, grid);

    const double entropy = detail::entropy_from_eval(eval.pdf, grid.spacing());
    const double sep_value = std::exp(2.0 * entropy) / (2.0 * std::numbers::pi * std::numbers::e);
    const double fim_value = detail::fim_from_eval(eval.pdf, eval.deriv, grid.spacing());
    if (!(sep_value > 0.0) || !(fim_value > 0.0))
        throw quadrature_failure("fs_point: non-positive plane coordinate for series '" +
                                 std::string(id) + "'");

    const double product = sep_value * fim_value;
    if (product < 1.0 - 1e-6)
        throw isoperimetric_violation(
            "fs_point: sep * fim = " + std::to_string(product) + " < 1 for series '" +
            std::string(id) + "'; this indicates a quadrature or grid bug");

    fs_point_result out;
    out.id = std::string(id);
    out.sep = sep_value;
    out.fim = fim_value;
    out.product = product;
    out.bandwidth = bw.bandwidth;
    out.n = remainder.size();
    out.fallback_bandwidth_used = bw.fallback;
    return out;
}

} // namespace fsts
