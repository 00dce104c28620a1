#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fsts/errors.hpp"
#include "fsts/parallel.hpp"

namespace fsts {

/// Complexity estimate: Euclidean length of the increment sequence,
/// sqrt(sum (x_i - x_{i+1})^2). Invariant under level shifts.
inline double complexity_estimate(std::span<const double> x) {
    if (x.size() < 2)
        throw series_too_short("complexity_estimate: need at least two samples");
    detail::kahan_sum acc;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double d = x[i] - x[i + 1];
        acc.add(d * d);
    }
    return std::sqrt(acc.value());
}

/// Handling of a pair where exactly one complexity estimate is zero (the
/// correction factor would divide by zero). strict raises
/// degenerate_complexity; lenient substitutes epsilon = 1e-12 * max(CE)
/// for the zero and flags the pair.
enum class cid_mode { strict, lenient };

namespace detail {

inline double euclidean_distance(std::span<const double> x, std::span<const double> y) {
    kahan_sum acc;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        acc.add(d * d);
    }
    return std::sqrt(acc.value());
}

struct cid_value {
    double distance;
    bool degenerate; ///< lenient epsilon guard was applied
};

inline cid_value cid_from_parts(double euclidean, double ce_x, double ce_y, cid_mode mode) {
    const double hi = std::max(ce_x, ce_y);
    const double lo = std::min(ce_x, ce_y);
    if (hi == 0.0) return {euclidean, false}; // two constant series: CF = 1
    if (lo == 0.0) {
        if (mode == cid_mode::strict)
            throw degenerate_complexity(
                "cid: exactly one series has zero complexity; correction factor undefined");
        return {(hi / (1e-12 * hi)) * euclidean, true};
    }
    return {(hi / lo) * euclidean, false};
}

} // namespace detail

/// Complexity-invariant distance: Euclidean distance scaled by
/// CF = max(CE_x, CE_y) / min(CE_x, CE_y).
inline double cid(std::span<const double> x, std::span<const double> y,
                  cid_mode mode = cid_mode::strict) {
    if (x.size() != y.size())
        throw length_mismatch("cid: series lengths differ (" + std::to_string(x.size()) +
                              " vs " + std::to_string(y.size()) + ")");
    const double ce_x = complexity_estimate(x);
    const double ce_y = complexity_estimate(y);
    return detail::cid_from_parts(detail::euclidean_distance(x, y), ce_x, ce_y, mode).distance;
}

/// Symmetric pairwise CID matrix with zero diagonal.
struct distance_matrix {
    std::vector<std::string> ids;
    std::vector<double> values; ///< row-major size() x size()
    std::vector<std::pair<std::size_t, std::size_t>> degenerate_pairs; ///< lenient guard hits

    std::size_t size() const { return ids.size(); }
    double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * size() + j]; }
};

/// Builds the full CID matrix; only the upper triangle is computed and then
/// mirrored. Complexity estimates are computed once per series.
inline distance_matrix compute_distance_matrix(const std::vector<std::vector<double>>& series,
                                               std::vector<std::string> ids,
                                               cid_mode mode = cid_mode::strict) {
    const std::size_t m = series.size();
    if (ids.size() != m)
        throw length_mismatch("distance_matrix: ids/series count mismatch");

    distance_matrix out;
    out.ids = std::move(ids);
    out.values.assign(m * m, 0.0);
    if (m == 0) return out;

    const std::size_t n = series.front().size();
    for (std::size_t i = 0; i < m; ++i)
        if (series[i].size() != n)
            throw length_mismatch("distance_matrix: series '" + out.ids[i] +
                                  "' has length " + std::to_string(series[i].size()) +
                                  ", expected " + std::to_string(n));

    std::vector<double> ce(m);
    for (std::size_t i = 0; i < m; ++i) {
        try {
            ce[i] = complexity_estimate(series[i]);
        } catch (const series_too_short&) {
            throw series_too_short("distance_matrix: series '" + out.ids[i] + "' is too short");
        }
    }

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            detail::cid_value v;
            try {
                v = detail::cid_from_parts(detail::euclidean_distance(series[i], series[j]),
                                           ce[i], ce[j], mode);
            } catch (const degenerate_complexity&) {
                throw degenerate_complexity("distance_matrix: pair ('" + out.ids[i] + "', '" +
                                            out.ids[j] +
                                            "') has exactly one zero complexity estimate");
            }
            out.at(i, j) = v.distance;
            out.at(j, i) = v.distance;
            if (v.degenerate) out.degenerate_pairs.emplace_back(i, j);
        }
    }
    return out;
}

} // namespace fsts
