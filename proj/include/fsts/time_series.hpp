#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "fsts/errors.hpp"

namespace fsts {

/// Uniformly sampled real-valued series. Timestamps are implied as
/// origin + i * step; there are no per-point timestamps. missing[i] != 0
/// marks a gap that has not been filled yet.
struct time_series {
    std::string id;
    std::int64_t origin = 0; ///< Unix epoch seconds, UTC
    std::int64_t step = 3600; ///< seconds between consecutive samples, > 0
    std::vector<double> values;
    std::vector<std::uint8_t> missing;

    std::size_t size() const { return values.size(); }
    std::int64_t timestamp_at(std::size_t i) const {
        return origin + static_cast<std::int64_t>(i) * step;
    }
    std::int64_t last_timestamp() const { return timestamp_at(values.size() - 1); }

    bool has_missing() const {
        for (auto m : missing)
            if (m) return true;
        return false;
    }

    /// Checks the structural invariants; throws malformed_input on violation.
    void check() const {
        if (values.size() != missing.size())
            throw malformed_input("series '" + id + "': values/missing length mismatch");
        if (values.size() < 2)
            throw malformed_input("series '" + id + "': need at least two samples");
        if (step <= 0) throw malformed_input("series '" + id + "': non-positive step");
    }
};

/// Replaces every masked run of length <= max_gap by linear interpolation
/// between its nearest unmasked neighbours. Unmasked values are passed
/// through untouched. A longer run, or a run touching either endpoint,
/// raises gap_too_large.
inline time_series fill_gaps(const time_series& ts, std::size_t max_gap) {
    ts.check();
    time_series out = ts;
    const std::size_t n = out.size();
    std::size_t i = 0;
    while (i < n) {
        if (!out.missing[i]) {
            ++i;
            continue;
        }
        std::size_t run_start = i;
        while (i < n && out.missing[i]) ++i;
        const std::size_t run_len = i - run_start;
        if (run_start == 0 || i == n)
            throw gap_too_large(out.id, run_start, run_len);
        if (run_len > max_gap)
            throw gap_too_large(out.id, run_start, run_len);
        const double left = out.values[run_start - 1];
        const double right = out.values[i];
        const double denom = static_cast<double>(run_len + 1);
        for (std::size_t j = 0; j < run_len; ++j) {
            out.values[run_start + j] =
                left + (right - left) * (static_cast<double>(j + 1) / denom);
            out.missing[run_start + j] = 0;
        }
    }
    return out;
}

/// Truncates all series to their maximal common time interval. Outputs share
/// origin and length. Requires equal steps and phase-aligned grids.
inline std::vector<time_series> align(const std::vector<time_series>& series) {
    if (series.empty()) return {};
    for (const auto& ts : series) ts.check();

    const std::int64_t step = series.front().step;
    for (const auto& ts : series)
        if (ts.step != step)
            throw irregular_sampling("align: series '" + ts.id + "' has step " +
                                     std::to_string(ts.step) + ", expected " +
                                     std::to_string(step));

    std::int64_t start = series.front().origin;
    std::int64_t end = series.front().last_timestamp();
    for (const auto& ts : series) {
        // Grids must be in phase or no timestamp is shared at all.
        std::int64_t delta = ts.origin - series.front().origin;
        if (delta % step != 0)
            throw no_overlap("align: series '" + ts.id + "' grid is out of phase");
        start = std::max(start, ts.origin);
        end = std::min(end, ts.last_timestamp());
    }
    if (start > end || (end - start) / step + 1 < 2)
        throw no_overlap("align: common interval shorter than two samples");

    const std::size_t count = static_cast<std::size_t>((end - start) / step) + 1;
    std::vector<time_series> out;
    out.reserve(series.size());
    for (const auto& ts : series) {
        const std::size_t offset = static_cast<std::size_t>((start - ts.origin) / step);
        time_series cut;
        cut.id = ts.id;
        cut.origin = start;
        cut.step = step;
        cut.values.assign(ts.values.begin() + offset, ts.values.begin() + offset + count);
        cut.missing.assign(ts.missing.begin() + offset, ts.missing.begin() + offset + count);
        out.push_back(std::move(cut));
    }
    return out;
}

} // namespace fsts
