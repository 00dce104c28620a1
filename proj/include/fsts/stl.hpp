#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fsts/errors.hpp"
#include "fsts/loess.hpp"
#include "fsts/time_series.hpp"

namespace fsts {

/// Parameters for the seasonal-trend decomposition. seasonal_window may be
/// the `periodic` sentinel, which replaces each cycle-subseries by its
/// (robustness-weighted) mean — appropriate for a fixed diurnal cycle.
struct stl_params {
    static constexpr std::size_t periodic = 0;

    std::size_t period = 24;
    std::size_t seasonal_window = periodic;
    std::size_t trend_window = 0; ///< 0 = auto: next odd integer >= 1.5 * period
    std::size_t inner_iterations = 2;
    std::size_t outer_iterations = 0; ///< robustness passes (bisquare on the remainder)

    void validate() const {
        if (period < 2) throw std::invalid_argument("stl: period must be >= 2");
        if (seasonal_window != periodic &&
            (seasonal_window < 3 || seasonal_window % 2 == 0))
            throw std::invalid_argument("stl: seasonal_window must be odd and >= 3, or periodic");
        if (trend_window != 0 && (trend_window < 3 || trend_window % 2 == 0))
            throw std::invalid_argument("stl: trend_window must be odd and >= 3");
        if (inner_iterations < 1)
            throw std::invalid_argument("stl: inner_iterations must be >= 1");
    }

    std::size_t resolved_trend_window() const {
        if (trend_window != 0) return trend_window;
        auto w = static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(period)));
        if (w % 2 == 0) ++w;
        return std::max<std::size_t>(w, 3);
    }

    std::size_t resolved_lowpass_window() const {
        std::size_t w = period;
        if (w % 2 == 0) ++w;
        return std::max<std::size_t>(w, 3);
    }
};

struct stl_decomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> remainder;
    std::size_t period = 0;
};

namespace detail {

inline std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
    const std::size_t n = x.size();
    std::vector<double> out(n - len + 1);
    for (std::size_t i = 0; i + len <= n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < len; ++j) s += x[i + j];
        out[i] = s / static_cast<double>(len);
    }
    return out;
}

inline double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    auto lo = std::max_element(v.begin(), mid);
    return (*lo + *mid) / 2.0;
}

} // namespace detail

/// Additive seasonal-trend decomposition by loess. The inner loop detrends,
/// smooths each cycle-subseries (extended one period on each side), removes
/// the low-pass component of the smoothed subseries (two moving averages of
/// length period, one of length 3, then a loess pass), deseasonalizes and
/// re-estimates the trend. Optional outer passes downweight outliers with
/// bisquare weights on the remainder. remainder = input - trend - seasonal
/// holds exactly by construction.
inline stl_decomposition stl_decompose(std::span<const double> y, const stl_params& params) {
    params.validate();
    const std::size_t n = y.size();
    const std::size_t p = params.period;
    if (n < 2 * p)
        throw series_too_short("stl: series length " + std::to_string(n) +
                               " is shorter than two periods (" + std::to_string(2 * p) + ")");

    const std::size_t trend_span = params.resolved_trend_window();
    const std::size_t lowpass_span = params.resolved_lowpass_window();

    std::vector<double> trend(n, 0.0);
    std::vector<double> seasonal(n, 0.0);
    std::vector<double> rw; // empty = unweighted
    std::vector<double> detrended(n), extended(n + 2 * p), deseasonalized(n);
    std::vector<double> sub, sub_rw;

    for (std::size_t outer = 0;; ++outer) {
        for (std::size_t inner = 0; inner < params.inner_iterations; ++inner) {
            for (std::size_t i = 0; i < n; ++i) detrended[i] = y[i] - trend[i];

            // Cycle-subseries smoothing, extended one period on each side.
            for (std::size_t phase = 0; phase < p; ++phase) {
                const std::size_t k = (n - 1 - phase) / p + 1;
                sub.resize(k);
                sub_rw.resize(rw.empty() ? 0 : k);
                for (std::size_t t = 0; t < k; ++t) {
                    sub[t] = detrended[phase + t * p];
                    if (!rw.empty()) sub_rw[t] = rw[phase + t * p];
                }
                if (params.seasonal_window == stl_params::periodic) {
                    double value;
                    if (rw.empty()) {
                        double s = 0.0;
                        for (double v : sub) s += v;
                        value = s / static_cast<double>(k);
                    } else {
                        double sw = 0.0, swv = 0.0;
                        for (std::size_t t = 0; t < k; ++t) {
                            sw += sub_rw[t];
                            swv += sub_rw[t] * sub[t];
                        }
                        if (sw > 0.0) {
                            value = swv / sw;
                        } else {
                            double s = 0.0;
                            for (double v : sub) s += v;
                            value = s / static_cast<double>(k);
                        }
                    }
                    for (std::size_t t = 0; t <= k + 1; ++t)
                        extended[phase + t * p] = value;
                } else {
                    std::span<const double> wspan =
                        rw.empty() ? std::span<const double>{} : std::span<const double>(sub_rw);
                    for (std::size_t t = 0; t <= k + 1; ++t)
                        extended[phase + t * p] = detail::loess_fit_at(
                            sub, params.seasonal_window, 1, wspan,
                            static_cast<double>(t) - 1.0);
                }
            }

            // Low-pass filter of the smoothed subseries; output aligns with
            // the original index range.
            auto pass = detail::moving_average(extended, p);
            pass = detail::moving_average(pass, p);
            pass = detail::moving_average(pass, 3);
            auto lowpass = loess_smooth(pass, lowpass_span, 1);

            for (std::size_t i = 0; i < n; ++i) seasonal[i] = extended[p + i] - lowpass[i];
            for (std::size_t i = 0; i < n; ++i) deseasonalized[i] = y[i] - seasonal[i];
            trend = loess_smooth(deseasonalized, trend_span, 1,
                                 rw.empty() ? std::span<const double>{}
                                            : std::span<const double>(rw));
        }

        if (outer >= params.outer_iterations) break;

        // Bisquare robustness weights from the absolute remainder.
        std::vector<double> abs_rem(n);
        for (std::size_t i = 0; i < n; ++i)
            abs_rem[i] = std::abs(y[i] - trend[i] - seasonal[i]);
        const double cutoff = 6.0 * detail::median_of(abs_rem);
        rw.assign(n, 1.0);
        if (cutoff > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                const double r = abs_rem[i];
                if (r <= 0.001 * cutoff) {
                    rw[i] = 1.0;
                } else if (r >= 0.999 * cutoff) {
                    rw[i] = 0.0;
                } else {
                    const double u = r / cutoff;
                    const double t = 1.0 - u * u;
                    rw[i] = t * t;
                }
            }
        }
    }

    stl_decomposition out;
    out.period = p;
    out.trend = std::move(trend);
    out.seasonal = std::move(seasonal);
    out.remainder.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.remainder[i] = y[i] - out.trend[i] - out.seasonal[i];
    return out;
}

inline stl_decomposition stl_decompose(const time_series& ts, const stl_params& params) {
    ts.check();
    if (ts.has_missing())
        throw malformed_input("stl: series '" + ts.id + "' still has gaps; fill them first");
    return stl_decompose(std::span<const double>(ts.values), params);
}

} // namespace fsts
