#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fsts/cid.hpp"
#include "fsts/config.hpp"
#include "fsts/csv.hpp"
#include "fsts/errors.hpp"
#include "fsts/infoplane.hpp"
#include "fsts/kde.hpp"
#include "fsts/medoids.hpp"
#include "fsts/parallel.hpp"
#include "fsts/stl.hpp"
#include "fsts/svg.hpp"
#include "fsts/text.hpp"
#include "fsts/time_series.hpp"

namespace fsts {

/// Stable name of a library error type, for structured error reports.
inline std::string error_type_name(const std::exception& e) {
    if (dynamic_cast<const malformed_input*>(&e)) return "malformed_input";
    if (dynamic_cast<const irregular_sampling*>(&e)) return "irregular_sampling";
    if (dynamic_cast<const gap_too_large*>(&e)) return "gap_too_large";
    if (dynamic_cast<const no_overlap*>(&e)) return "no_overlap";
    if (dynamic_cast<const series_too_short*>(&e)) return "series_too_short";
    if (dynamic_cast<const degenerate_sample*>(&e)) return "degenerate_sample";
    if (dynamic_cast<const bandwidth_failure*>(&e)) return "bandwidth_failure";
    if (dynamic_cast<const quadrature_failure*>(&e)) return "quadrature_failure";
    if (dynamic_cast<const isoperimetric_violation*>(&e)) return "isoperimetric_violation";
    if (dynamic_cast<const length_mismatch*>(&e)) return "length_mismatch";
    if (dynamic_cast<const degenerate_complexity*>(&e)) return "degenerate_complexity";
    if (dynamic_cast<const invalid_k*>(&e)) return "invalid_k";
    if (dynamic_cast<const config_error*>(&e)) return "config_error";
    if (dynamic_cast<const error*>(&e)) return "error";
    return "internal_error";
}

/// Parsed, gap-filled, aligned and decomposed input: everything downstream
/// analyses consume.
struct prepared_input {
    std::vector<time_series> aligned;
    std::vector<stl_decomposition> decompositions;
    std::vector<std::vector<double>> remainders; ///< standardized when requested
    std::vector<std::string> ids;
};

/// Shared front half of every command: CSV -> gap fill -> align -> STL.
/// With standardize, each remainder is centered and scaled to unit sample
/// variance before density estimation (plane coordinates are scale
/// dependent, so this is opt-in and recorded in the manifest).
inline prepared_input prepare_input(const std::filesystem::path& csv_path, std::size_t max_gap,
                                    const stl_params& params, bool standardize) {
    prepared_input out;
    auto series = parse_csv(csv_path);
    for (auto& ts : series) ts = fill_gaps(ts, max_gap);
    out.aligned = align(series);
    for (const auto& ts : out.aligned) {
        out.ids.push_back(ts.id);
        out.decompositions.push_back(stl_decompose(ts, params));
        auto remainder = out.decompositions.back().remainder;
        if (standardize) {
            const double sd = detail::sample_sd(remainder);
            if (!(sd > 0.0))
                throw degenerate_sample("standardize: series '" + ts.id +
                                        "' has a constant remainder");
            double mean = 0.0;
            for (double v : remainder) mean += v;
            mean /= static_cast<double>(remainder.size());
            for (double& v : remainder) v = (v - mean) / sd;
        }
        out.remainders.push_back(std::move(remainder));
    }
    return out;
}

namespace detail {

inline std::string sanitize_filename(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
        out += ok ? c : '_';
    }
    return out.empty() ? std::string("unnamed") : out;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw error("short write to '" + path.string() + "'");
}

inline nlohmann::json fs_points_json(std::span<const fs_point_result> points) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : points) {
        arr.push_back({{"id", p.id},
                       {"sep", p.sep},
                       {"fim", p.fim},
                       {"product", p.product},
                       {"bandwidth", p.bandwidth},
                       {"n", p.n},
                       {"fallback_bandwidth_used", p.fallback_bandwidth_used}});
    }
    return arr;
}

inline std::string distance_matrix_csv(const distance_matrix& dm) {
    std::string out = "id";
    for (const auto& id : dm.ids) out += "," + id;
    out += "\n";
    for (std::size_t i = 0; i < dm.size(); ++i) {
        out += dm.ids[i];
        for (std::size_t j = 0; j < dm.size(); ++j) out += "," + double_to_string(dm.at(i, j));
        out += "\n";
    }
    return out;
}

inline nlohmann::json clustering_json(const clustering& c, const k_selection& selection,
                                      std::span<const std::string> ids) {
    nlohmann::json labels = nlohmann::json::object();
    nlohmann::json silhouettes = nlohmann::json::object();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        labels[ids[i]] = c.labels[i];
        silhouettes[ids[i]] = c.silhouettes[i];
    }
    nlohmann::json medoids = nlohmann::json::array();
    for (auto idx : c.medoids) medoids.push_back(ids[idx]);
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& [k, s] : selection.curve)
        curve.push_back({{"k", k}, {"avg_silhouette", s}});
    return {{"k", c.k},
            {"labels", labels},
            {"medoids", medoids},
            {"silhouettes", silhouettes},
            {"avg_silhouette", c.avg_silhouette},
            {"total_within_cluster_distance", c.total_cost},
            {"per_k_silhouette_curve", curve}};
}

inline std::string components_csv(const time_series& ts, const stl_decomposition& d) {
    std::string out = "timestamp,trend,seasonal,remainder\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out += format_iso8601(ts.timestamp_at(i));
        out += "," + double_to_string(d.trend[i]);
        out += "," + double_to_string(d.seasonal[i]);
        out += "," + double_to_string(d.remainder[i]);
        out += "\n";
    }
    return out;
}

inline std::string density_csv(const density_model& model, const eval_grid& grid) {
    const auto eval = evaluate_on_grid(model, grid);
    std::string out = "x,pdf,pdf_derivative\n";
    for (std::size_t i = 0; i < grid.m; ++i) {
        out += double_to_string(grid.point(i));
        out += "," + double_to_string(eval.pdf[i]);
        out += "," + double_to_string(eval.deriv[i]);
        out += "\n";
    }
    return out;
}

inline nlohmann::json config_json(const run_config& cfg) {
    // Everything analysis-relevant, with resolved defaults. The worker count
    // is an execution detail and deliberately not part of the manifest:
    // artifacts are identical for any worker count.
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& [name, path] : cfg.inputs)
        inputs.push_back({{"pollutant", name}, {"path", path}});
    nlohmann::json stl = {
        {"period", cfg.stl.period},
        {"seasonal_window", cfg.stl.seasonal_window == stl_params::periodic
                                ? nlohmann::json("periodic")
                                : nlohmann::json(cfg.stl.seasonal_window)},
        {"trend_window", cfg.stl.resolved_trend_window()},
        {"lowpass_window", cfg.stl.resolved_lowpass_window()},
        {"loess_degrees", {{"seasonal", 1}, {"trend", 1}, {"lowpass", 1}}},
        {"inner_iterations", cfg.stl.inner_iterations},
        {"outer_iterations", cfg.stl.outer_iterations},
    };
    return {{"inputs", inputs},
            {"max_gap", cfg.max_gap},
            {"stl", stl},
            {"kde",
             {{"grid_points", cfg.grid_points},
              {"grid_padding_bandwidths", 8},
              {"standardize", cfg.standardize},
              {"bandwidth", "sheather-jones direct plug-in, 2 stages"},
              {"bandwidth_fallback", "silverman"}}},
            {"cluster",
             {{"algorithm", "k-medoids (PAM) on the CID matrix"},
              {"k_min", cfg.k_min},
              {"k_max", cfg.k_max},
              {"restarts", cfg.restarts},
              {"cid_degenerate_mode", "lenient"},
              {"tie_breaking", "lowest index"}}},
            {"seed", cfg.seed},
            {"emit",
             {{"components_csv", cfg.emit_components_csv},
              {"density_csv", cfg.emit_density_csv},
              {"svg", cfg.emit_svg}}},
            {"output_dir", cfg.output_dir.string()}};
}

} // namespace detail

struct pollutant_report {
    std::string name;
    std::string input_path;
    bool ok = false;
    std::string error_type;    ///< empty when ok
    std::string error_message; ///< empty when ok
    std::vector<std::string> station_ids;
    std::size_t samples_per_series = 0;
    std::size_t chosen_k = 0;
    double avg_silhouette = 0.0;
    std::vector<std::string> fallback_bandwidth_series;
    std::vector<std::pair<std::string, std::string>> degenerate_cid_pairs;
};

struct pipeline_result {
    std::vector<pollutant_report> reports;
    std::filesystem::path manifest_path;
    bool all_ok = false;
};

/// Runs the full analysis for every configured pollutant: ingest, STL,
/// Fisher-Shannon coordinates, CID clustering with silhouette-selected k,
/// plots and a run manifest. A failure in one pollutant is reported and
/// does not stop the others.
inline pipeline_result run_pipeline(const run_config& cfg) {
    set_max_workers(static_cast<unsigned>(cfg.workers));
    std::filesystem::create_directories(cfg.output_dir);

    pipeline_result result;
    result.all_ok = true;

    for (const auto& [pollutant, input_path] : cfg.inputs) {
        pollutant_report report;
        report.name = pollutant;
        report.input_path = input_path;
        const auto dir = cfg.output_dir / detail::sanitize_filename(pollutant);

        try {
            auto prep = prepare_input(input_path, cfg.max_gap, cfg.stl, cfg.standardize);
            report.station_ids = prep.ids;
            report.samples_per_series = prep.aligned.front().size();
            std::filesystem::create_directories(dir);

            if (cfg.emit_components_csv) {
                std::filesystem::create_directories(dir / "components");
                for (std::size_t i = 0; i < prep.aligned.size(); ++i)
                    detail::write_text_file(
                        dir / "components" /
                            (detail::sanitize_filename(prep.ids[i]) + "_stl.csv"),
                        detail::components_csv(prep.aligned[i], prep.decompositions[i]));
            }

            std::vector<fs_point_result> points;
            points.reserve(prep.remainders.size());
            for (std::size_t i = 0; i < prep.remainders.size(); ++i) {
                points.push_back(fs_point(prep.ids[i], prep.remainders[i], cfg.grid_points));
                if (points.back().fallback_bandwidth_used)
                    report.fallback_bandwidth_series.push_back(prep.ids[i]);
            }
            detail::write_text_file(dir / "fs_points.json",
                                    detail::fs_points_json(points).dump(2) + "\n");

            if (cfg.emit_density_csv) {
                std::filesystem::create_directories(dir / "density");
                for (std::size_t i = 0; i < prep.remainders.size(); ++i) {
                    density_model model{prep.remainders[i], points[i].bandwidth};
                    detail::write_text_file(
                        dir / "density" /
                            (detail::sanitize_filename(prep.ids[i]) + "_density.csv"),
                        detail::density_csv(model, make_grid(model, cfg.grid_points)));
                }
            }

            auto dm = compute_distance_matrix(prep.remainders, prep.ids, cid_mode::lenient);
            for (const auto& [i, j] : dm.degenerate_pairs)
                report.degenerate_cid_pairs.emplace_back(prep.ids[i], prep.ids[j]);
            detail::write_text_file(dir / "distance_matrix.csv",
                                    detail::distance_matrix_csv(dm));

            const std::size_t k_max = std::min(cfg.k_max, dm.size() - 1);
            auto selection = select_k(dm, cfg.k_min, k_max, cfg.seed, cfg.restarts);
            detail::write_text_file(
                dir / "clustering.json",
                detail::clustering_json(selection.best, selection, prep.ids).dump(2) + "\n");

            if (cfg.emit_svg) {
                detail::write_text_file(
                    dir / "fs_plane.svg",
                    fs_plane_svg(points, selection.best.labels, selection.best.k,
                                 pollutant + ": Fisher-Shannon plane"));
                detail::write_text_file(
                    dir / "silhouette.svg",
                    silhouette_curve_svg(selection.curve, selection.best.k,
                                         pollutant + ": silhouette width by cluster count"));
            }

            report.chosen_k = selection.best.k;
            report.avg_silhouette = selection.best.avg_silhouette;
            report.ok = true;
        } catch (const std::exception& e) {
            report.ok = false;
            report.error_type = error_type_name(e);
            report.error_message = e.what();
            result.all_ok = false;
        }
        result.reports.push_back(std::move(report));
    }

    nlohmann::json pollutants = nlohmann::json::array();
    for (const auto& r : result.reports) {
        nlohmann::json flags = {{"fallback_bandwidth", r.fallback_bandwidth_series},
                                {"degenerate_cid_pairs", nlohmann::json::array()}};
        for (const auto& [a, b] : r.degenerate_cid_pairs)
            flags["degenerate_cid_pairs"].push_back({a, b});
        nlohmann::json entry = {{"name", r.name},
                                {"input", r.input_path},
                                {"ok", r.ok},
                                {"stations", r.station_ids},
                                {"samples_per_series", r.samples_per_series},
                                {"flags", flags}};
        if (r.ok) {
            entry["chosen_k"] = r.chosen_k;
            entry["avg_silhouette"] = r.avg_silhouette;
            entry["error"] = nullptr;
        } else {
            entry["error"] = {{"type", r.error_type}, {"message", r.error_message}};
        }
        pollutants.push_back(std::move(entry));
    }
    nlohmann::json manifest = {{"tool", "fsts"},
                               {"config", detail::config_json(cfg)},
                               {"pollutants", pollutants},
                               {"status", result.all_ok ? "ok" : "partial_failure"}};
    result.manifest_path = cfg.output_dir / "manifest.json";
    detail::write_text_file(result.manifest_path, manifest.dump(2) + "\n");
    return result;
}

} // namespace fsts
