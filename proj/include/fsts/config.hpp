#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsts/errors.hpp"
#include "fsts/stl.hpp"
#include "fsts/text.hpp"

namespace fsts {

/// Fully resolved analysis parameters. Defaults here are the documented
/// defaults of the config file format; validate_config materializes them
/// and the pipeline echoes every value into the run manifest.
struct run_config {
    std::vector<std::pair<std::string, std::string>> inputs; ///< (pollutant, csv path)
    std::size_t max_gap = 6;
    stl_params stl;
    std::size_t grid_points = 4096;
    bool standardize = false;
    std::size_t k_min = 2;
    std::size_t k_max = 10;
    std::uint64_t seed = 1;
    std::size_t restarts = 20;
    std::filesystem::path output_dir = "fsts-out";
    bool emit_components_csv = false;
    bool emit_density_csv = false;
    bool emit_svg = true;
    std::size_t workers = 0; ///< 0 = hardware concurrency; results never depend on it
};

namespace detail {

inline std::uint64_t parse_config_uint(std::string_view key, std::string_view value,
                                       std::uint64_t min_value, std::uint64_t max_value) {
    long long v;
    if (!parse_int64(value, v) || v < 0)
        throw config_error("config: " + std::string(key) + " must be a non-negative integer, got '" +
                           std::string(value) + "'");
    const auto u = static_cast<std::uint64_t>(v);
    if (u < min_value || u > max_value)
        throw config_error("config: " + std::string(key) + " = " + std::string(value) +
                           " is out of range [" + std::to_string(min_value) + ", " +
                           std::to_string(max_value) + "]");
    return u;
}

inline bool parse_config_bool(std::string_view key, std::string_view value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw config_error("config: " + std::string(key) + " must be 'true' or 'false', got '" +
                       std::string(value) + "'");
}

inline std::size_t parse_odd_window(std::string_view key, std::string_view value) {
    const auto v = parse_config_uint(key, value, 3, 1u << 20);
    if (v % 2 == 0)
        throw config_error("config: " + std::string(key) + " must be odd, got " +
                           std::string(value));
    return static_cast<std::size_t>(v);
}

} // namespace detail

/// Parses the key-value config format:
///   - one `key = value` pair per line, `#` starts a full-line comment
///   - unknown or duplicate keys are errors (catches typos early)
///   - `input.<name> = <csv path>` declares one pollutant input; at least
///     one is required
/// File existence is checked by validate_config, not here.
inline run_config parse_config(std::istream& in, std::string_view source = "<stream>") {
    run_config cfg;
    std::map<std::string, bool, std::less<>> seen;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view raw = trim(line);
        if (raw.empty() || raw.front() == '#') continue;
        const auto eq = raw.find('=');
        if (eq == std::string_view::npos)
            throw config_error(std::string(source) + ":" + std::to_string(line_no) +
                               ": expected 'key = value'");
        const std::string key(trim(raw.substr(0, eq)));
        const std::string value(trim(raw.substr(eq + 1)));
        if (key.empty())
            throw config_error(std::string(source) + ":" + std::to_string(line_no) +
                               ": empty key");
        if (!seen.emplace(key, true).second)
            throw config_error("config: duplicate key '" + key + "'");

        if (key.rfind("input.", 0) == 0) {
            const std::string name = key.substr(6);
            if (name.empty()) throw config_error("config: empty pollutant name in '" + key + "'");
            if (value.empty()) throw config_error("config: empty path for '" + key + "'");
            cfg.inputs.emplace_back(name, value);
        } else if (key == "output_dir") {
            if (value.empty()) throw config_error("config: output_dir must not be empty");
            cfg.output_dir = value;
        } else if (key == "max_gap") {
            cfg.max_gap = detail::parse_config_uint(key, value, 0, 1u << 20);
        } else if (key == "stl.period") {
            cfg.stl.period = detail::parse_config_uint(key, value, 2, 1u << 20);
        } else if (key == "stl.seasonal_window") {
            cfg.stl.seasonal_window =
                value == "periodic" ? stl_params::periodic : detail::parse_odd_window(key, value);
        } else if (key == "stl.trend_window") {
            cfg.stl.trend_window = value == "auto" ? 0 : detail::parse_odd_window(key, value);
        } else if (key == "stl.inner_iterations") {
            cfg.stl.inner_iterations = detail::parse_config_uint(key, value, 1, 1000);
        } else if (key == "stl.outer_iterations") {
            cfg.stl.outer_iterations = detail::parse_config_uint(key, value, 0, 1000);
        } else if (key == "kde.grid_points") {
            cfg.grid_points = detail::parse_config_uint(key, value, 2, 1u << 24);
        } else if (key == "kde.standardize") {
            cfg.standardize = detail::parse_config_bool(key, value);
        } else if (key == "cluster.k_min") {
            cfg.k_min = detail::parse_config_uint(key, value, 2, 1u << 20);
        } else if (key == "cluster.k_max") {
            cfg.k_max = detail::parse_config_uint(key, value, 2, 1u << 20);
        } else if (key == "cluster.restarts") {
            cfg.restarts = detail::parse_config_uint(key, value, 1, 1u << 20);
        } else if (key == "seed") {
            long long v;
            if (!parse_int64(value, v) || v < 0)
                throw config_error("config: seed must be a non-negative integer");
            cfg.seed = static_cast<std::uint64_t>(v);
        } else if (key == "workers") {
            cfg.workers = detail::parse_config_uint(key, value, 0, 4096);
        } else if (key == "emit.components_csv") {
            cfg.emit_components_csv = detail::parse_config_bool(key, value);
        } else if (key == "emit.density_csv") {
            cfg.emit_density_csv = detail::parse_config_bool(key, value);
        } else if (key == "emit.svg") {
            cfg.emit_svg = detail::parse_config_bool(key, value);
        } else {
            throw config_error("config: unknown key '" + key + "'");
        }
    }

    if (cfg.inputs.empty())
        throw config_error("config: at least one 'input.<name> = <csv>' entry is required");
    if (cfg.k_min > cfg.k_max)
        throw config_error("config: cluster.k_min exceeds cluster.k_max");
    try {
        cfg.stl.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return cfg;
}

/// Loads, defaults and validates a config file; referenced input paths must
/// exist (relative paths resolve against the config file's directory).
inline run_config validate_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path.string() + "'");
    run_config cfg = parse_config(in, path.string());

    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    for (auto& [name, input] : cfg.inputs) {
        std::filesystem::path p(input);
        if (p.is_relative()) p = base / p;
        if (!std::filesystem::exists(p))
            throw config_error("config: input." + name + " path does not exist: '" + p.string() +
                               "'");
        input = p.string();
    }
    if (cfg.output_dir.is_relative()) cfg.output_dir = base / cfg.output_dir;
    return cfg;
}

} // namespace fsts
