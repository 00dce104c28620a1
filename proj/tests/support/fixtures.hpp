#pragma once

// Synthetic pollutant-style CSV fixtures with two generative regimes:
// "calm" stations carry smooth, strongly autocorrelated fluctuations on the
// daily cycle, "busy" stations carry large fast fluctuations. After STL the
// remainders separate cleanly in both complexity and plane coordinates.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "fsts/csv.hpp"
#include "fsts/time_series.hpp"
#include "generators.hpp"

namespace fixtures {

struct two_regime_spec {
    std::size_t hours = 960;
    std::size_t calm_stations = 3;
    std::size_t busy_stations = 3;
    std::uint64_t seed = 20170901;
    bool punch_gaps = false;        ///< mask a few short interior runs
    std::int64_t origin = 1504224000; ///< 2017-09-01T00:00:00Z
};

struct two_regime_fixture {
    std::vector<std::string> calm_ids;
    std::vector<std::string> busy_ids;
    std::vector<std::string> all_ids; ///< column order in the file
};

inline two_regime_fixture write_two_regime_csv(const std::filesystem::path& path,
                                               const two_regime_spec& spec) {
    two_regime_fixture out;
    std::vector<fsts::time_series> series;

    auto add = [&](const std::string& id, std::vector<double> values) {
        fsts::time_series ts;
        ts.id = id;
        ts.origin = spec.origin;
        ts.step = 3600;
        ts.values = std::move(values);
        ts.missing.assign(ts.values.size(), 0);
        series.push_back(std::move(ts));
        out.all_ids.push_back(id);
    };

    for (std::size_t s = 0; s < spec.calm_stations; ++s) {
        const std::string id = "calm_" + std::to_string(s + 1);
        add(id, testgen::diurnal_series(spec.seed + s, spec.hours, 8.0 + s, 0.5, 0.97,
                                        25.0 + 2.0 * s));
        out.calm_ids.push_back(id);
    }
    for (std::size_t s = 0; s < spec.busy_stations; ++s) {
        const std::string id = "busy_" + std::to_string(s + 1);
        add(id, testgen::diurnal_series(spec.seed + 1000 + s, spec.hours, 10.0 + s, 3.0, 0.2,
                                        40.0 + 3.0 * s));
        out.busy_ids.push_back(id);
    }

    if (spec.punch_gaps) {
        // short interior runs only, so the default max_gap heals them
        for (std::size_t s = 0; s < series.size(); ++s) {
            const std::size_t start = 100 + 37 * s;
            const std::size_t len = 1 + s % 3;
            for (std::size_t i = start; i < start + len && i + 1 < spec.hours; ++i) {
                series[s].values[i] = std::numeric_limits<double>::quiet_NaN();
                series[s].missing[i] = 1;
            }
        }
    }

    fsts::write_csv(path, series);
    return out;
}

} // namespace fixtures
