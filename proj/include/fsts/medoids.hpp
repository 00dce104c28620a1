#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fsts/cid.hpp"
#include "fsts/errors.hpp"

namespace fsts {

/// A partition of the series set around k medoids.
struct clustering {
    std::size_t k = 0;
    std::vector<std::size_t> labels;  ///< cluster index per series, in [0, k)
    std::vector<std::size_t> medoids; ///< series index per cluster, ascending
    std::vector<double> silhouettes;  ///< per-series silhouette width, in [-1, 1]
    double avg_silhouette = 0.0;
    double total_cost = 0.0;          ///< sum of distances to the owning medoid
};

namespace detail {

/// Unbiased uniform draw from [0, n) on top of a seeded engine; avoids the
/// implementation-defined std::uniform_int_distribution so runs reproduce
/// across standard libraries.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = (UINT64_MAX / span) * span;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % span);
}

inline std::vector<std::size_t> sample_distinct(std::mt19937_64& rng, std::size_t k,
                                                std::size_t m) {
    std::vector<std::size_t> pool(m);
    for (std::size_t i = 0; i < m; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i)
        std::swap(pool[i], pool[i + uniform_index(rng, m - i)]);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace detail

/// Per-series silhouette widths and their average. a(i) is the mean distance
/// to co-members, b(i) the smallest mean distance to another cluster;
/// s(i) = (b - a) / max(a, b). Singleton clusters get s = 0 by convention.
inline std::pair<std::vector<double>, double> silhouette(const distance_matrix& dm,
                                                         std::span<const std::size_t> labels) {
    const std::size_t m = dm.size();
    if (labels.size() != m)
        throw std::invalid_argument("silhouette: labels/matrix size mismatch");

    std::size_t k = 0;
    for (auto label : labels) k = std::max(k, label + 1);
    if (k < 2) throw invalid_k("silhouette: need at least two clusters");

    std::vector<std::size_t> cluster_size(k, 0);
    for (auto label : labels) ++cluster_size[label];
    for (std::size_t c = 0; c < k; ++c)
        if (cluster_size[c] == 0)
            throw std::invalid_argument("silhouette: empty cluster " + std::to_string(c));

    std::vector<double> s(m, 0.0);
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < m; ++i) {
        if (cluster_size[labels[i]] == 1) {
            s[i] = 0.0;
            continue;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) sums[labels[j]] += dm.at(i, j);
        const double a = sums[labels[i]] / static_cast<double>(cluster_size[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == labels[i]) continue;
            b = std::min(b, sums[c] / static_cast<double>(cluster_size[c]));
        }
        const double denom = std::max(a, b);
        s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    double avg = 0.0;
    for (double v : s) avg += v;
    avg /= static_cast<double>(m);
    return {std::move(s), avg};
}

namespace detail {

struct pam_state {
    std::vector<std::size_t> medoids; // ascending
    std::vector<std::size_t> labels;
    double cost = 0.0;
};

inline pam_state pam_run(const distance_matrix& dm, std::vector<std::size_t> medoids) {
    const std::size_t m = dm.size();
    const std::size_t k = medoids.size();
    pam_state state;
    state.labels.assign(m, 0);
    double previous_cost = std::numeric_limits<double>::infinity();

    for (std::size_t iteration = 0;; ++iteration) {
        if (iteration > m * m + 100)
            throw std::logic_error("pam: failed to converge");

        // Assignment: nearest medoid; medoids are ascending, so keeping the
        // first winner breaks ties toward the lower medoid index. Each
        // medoid stays in its own cluster.
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t best = 0;
            double best_d = dm.at(i, medoids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = dm.at(i, medoids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            state.labels[i] = best;
        }
        for (std::size_t c = 0; c < k; ++c) state.labels[medoids[c]] = c;

        double assign_cost = 0.0;
        for (std::size_t i = 0; i < m; ++i) assign_cost += dm.at(i, medoids[state.labels[i]]);
        if (assign_cost > previous_cost * (1.0 + 1e-12) + 1e-12)
            throw std::logic_error("pam: within-cluster cost increased on assignment");

        // Update: each cluster's medoid becomes the member with the minimal
        // within-cluster distance sum; ties go to the lower index.
        std::vector<std::size_t> next(k);
        for (std::size_t c = 0; c < k; ++c) {
            double best_sum = std::numeric_limits<double>::infinity();
            std::size_t best_idx = medoids[c];
            for (std::size_t i = 0; i < m; ++i) {
                if (state.labels[i] != c) continue;
                double sum = 0.0;
                for (std::size_t j = 0; j < m; ++j)
                    if (state.labels[j] == c) sum += dm.at(i, j);
                if (sum < best_sum) {
                    best_sum = sum;
                    best_idx = i;
                }
            }
            next[c] = best_idx;
        }

        // Cost under the new medoids with unchanged membership; the argmin
        // update cannot make it worse than assign_cost.
        double update_cost = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            update_cost += dm.at(i, next[state.labels[i]]);
        if (update_cost > assign_cost * (1.0 + 1e-12) + 1e-12)
            throw std::logic_error("pam: within-cluster cost increased on medoid update");

        std::sort(next.begin(), next.end());
        if (next == medoids) {
            state.medoids = std::move(medoids);
            state.cost = assign_cost;
            return state;
        }
        medoids = std::move(next);
        previous_cost = update_cost;
    }
}

} // namespace detail

/// PAM-style k-medoids over a precomputed distance matrix: alternate
/// nearest-medoid assignment and within-cluster medoid updates to a fixed
/// point, over `restarts` seeded random initializations (distinct initial
/// medoid sets whenever enough exist), keeping the lowest-cost result.
/// All tie-breaking is by lowest index, so runs are reproducible.
inline clustering partition_medoids(const distance_matrix& dm, std::size_t k,
                                    std::uint64_t seed, std::size_t restarts) {
    const std::size_t m = dm.size();
    if (k < 2 || k + 1 > m)
        throw invalid_k("partition_medoids: k = " + std::to_string(k) + " outside [2, " +
                        std::to_string(m == 0 ? 0 : m - 1) + "]");
    if (restarts < 1) throw std::invalid_argument("partition_medoids: restarts must be >= 1");

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> inits;
    std::set<std::vector<std::size_t>> seen;
    std::size_t attempts = 0;
    while (inits.size() < restarts && attempts < restarts * 64) {
        ++attempts;
        auto candidate = detail::sample_distinct(rng, k, m);
        if (seen.insert(candidate).second) inits.push_back(std::move(candidate));
    }

    detail::pam_state best;
    best.cost = std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (const auto& init : inits) {
        auto state = detail::pam_run(dm, init);
        if (!have_best || state.cost < best.cost) {
            best = std::move(state);
            have_best = true;
        }
    }

    clustering out;
    out.k = k;
    out.labels = std::move(best.labels);
    out.medoids = std::move(best.medoids);
    out.total_cost = best.cost;
    auto [s, avg] = silhouette(dm, out.labels);
    out.silhouettes = std::move(s);
    out.avg_silhouette = avg;
    return out;
}

struct k_selection {
    clustering best;
    std::vector<std::pair<std::size_t, double>> curve; ///< (k, average silhouette)
};

/// Sweeps k over [k_min, k_max] and returns the clustering with the highest
/// average silhouette width (ties to the smaller k) plus the full curve.
inline k_selection select_k(const distance_matrix& dm, std::size_t k_min, std::size_t k_max,
                            std::uint64_t seed, std::size_t restarts) {
    const std::size_t m = dm.size();
    if (k_min < 2 || k_min > k_max || k_max + 1 > m)
        throw invalid_k("select_k: need 2 <= k_min <= k_max <= " +
                        std::to_string(m == 0 ? 0 : m - 1) + ", got [" + std::to_string(k_min) +
                        ", " + std::to_string(k_max) + "]");
    k_selection out;
    bool have_best = false;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        auto c = partition_medoids(dm, k, seed, restarts);
        out.curve.emplace_back(k, c.avg_silhouette);
        if (!have_best || c.avg_silhouette > out.best.avg_silhouette) {
            out.best = std::move(c);
            have_best = true;
        }
    }
    return out;
}

} // namespace fsts
