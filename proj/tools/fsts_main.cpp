#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fsts/fsts.hpp"

namespace {

// Options shared by the one-shot subcommands (fsplane, cluster, decompose).
struct prep_options {
    std::string input;
    std::size_t max_gap = 6;
    std::size_t period = 24;
    std::string seasonal_window = "periodic";
    std::string trend_window = "auto";
    std::size_t inner_iterations = 2;
    std::size_t outer_iterations = 0;
    bool standardize = false;

    fsts::stl_params stl() const {
        fsts::stl_params params;
        params.period = period;
        if (seasonal_window == "periodic") {
            params.seasonal_window = fsts::stl_params::periodic;
        } else {
            long long v;
            if (!fsts::parse_int64(seasonal_window, v) || v < 3 || v % 2 == 0)
                throw fsts::config_error("--seasonal-window must be 'periodic' or an odd "
                                         "integer >= 3");
            params.seasonal_window = static_cast<std::size_t>(v);
        }
        if (trend_window == "auto") {
            params.trend_window = 0;
        } else {
            long long v;
            if (!fsts::parse_int64(trend_window, v) || v < 3 || v % 2 == 0)
                throw fsts::config_error("--trend-window must be 'auto' or an odd integer >= 3");
            params.trend_window = static_cast<std::size_t>(v);
        }
        params.inner_iterations = inner_iterations;
        params.outer_iterations = outer_iterations;
        params.validate();
        return params;
    }
};

void add_prep_options(CLI::App* cmd, prep_options& opt) {
    cmd->add_option("--input", opt.input, "input CSV (timestamp column + one column per series)")
        ->required();
    cmd->add_option("--max-gap", opt.max_gap,
                    "longest missing run filled by linear interpolation (samples)");
    cmd->add_option("--period", opt.period, "seasonal period in samples (24 = daily cycle)");
    cmd->add_option("--seasonal-window", opt.seasonal_window,
                    "'periodic' or an odd loess span for the cycle-subseries");
    cmd->add_option("--trend-window", opt.trend_window, "'auto' or an odd loess span");
    cmd->add_option("--inner-iterations", opt.inner_iterations, "STL inner loop passes");
    cmd->add_option("--outer-iterations", opt.outer_iterations, "STL robustness passes");
}

void write_or_print(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    fsts::detail::write_text_file(path, content);
}

std::optional<unsigned> workers_from_env() {
    const char* env = std::getenv("FSTS_WORKERS");
    if (env == nullptr || *env == '\0') return std::nullopt;
    long long v;
    if (!fsts::parse_int64(env, v) || v < 0)
        throw fsts::config_error("FSTS_WORKERS must be a non-negative integer");
    return static_cast<unsigned>(v);
}

int run_analyze(const std::string& config_path) {
    auto cfg = fsts::validate_config(config_path);
    if (auto workers = workers_from_env()) cfg.workers = *workers;
    auto result = fsts::run_pipeline(cfg);
    for (const auto& report : result.reports) {
        if (report.ok) {
            std::cout << report.name << ": ok (stations=" << report.station_ids.size()
                      << ", n=" << report.samples_per_series << ", k=" << report.chosen_k
                      << ", avg silhouette="
                      << fsts::double_to_string_fixed(report.avg_silhouette, 4) << ")\n";
        } else {
            std::cout << report.name << ": FAILED (" << report.error_type << ": "
                      << report.error_message << ")\n";
        }
    }
    std::cout << "manifest: " << result.manifest_path.string() << "\n";
    return result.all_ok ? 0 : 1;
}

int run_fsplane(const prep_options& opt, std::size_t grid_points, const std::string& output) {
    auto prep = fsts::prepare_input(opt.input, opt.max_gap, opt.stl(), opt.standardize);
    std::vector<fsts::fs_point_result> points;
    for (std::size_t i = 0; i < prep.remainders.size(); ++i)
        points.push_back(fsts::fs_point(prep.ids[i], prep.remainders[i], grid_points));
    write_or_print(output, fsts::detail::fs_points_json(points).dump(2) + "\n");
    return 0;
}

int run_cluster(const prep_options& opt, std::size_t k_min, std::size_t k_max,
                std::uint64_t seed, std::size_t restarts, const std::string& output,
                const std::string& matrix_output) {
    auto prep = fsts::prepare_input(opt.input, opt.max_gap, opt.stl(), opt.standardize);
    auto dm = fsts::compute_distance_matrix(prep.remainders, prep.ids,
                                            fsts::cid_mode::lenient);
    if (!matrix_output.empty())
        fsts::detail::write_text_file(matrix_output, fsts::detail::distance_matrix_csv(dm));
    const std::size_t k_hi = std::min(k_max, dm.size() - 1);
    auto selection = fsts::select_k(dm, k_min, k_hi, seed, restarts);
    write_or_print(output,
                   fsts::detail::clustering_json(selection.best, selection, prep.ids).dump(2) +
                       "\n");
    return 0;
}

int run_decompose(const prep_options& opt, const std::string& output_dir,
                  const std::string& only_series) {
    auto prep = fsts::prepare_input(opt.input, opt.max_gap, opt.stl(), false);
    std::filesystem::create_directories(output_dir);
    bool matched = false;
    for (std::size_t i = 0; i < prep.aligned.size(); ++i) {
        if (!only_series.empty() && prep.ids[i] != only_series) continue;
        matched = true;
        const auto path = std::filesystem::path(output_dir) /
                          (fsts::detail::sanitize_filename(prep.ids[i]) + "_stl.csv");
        fsts::detail::write_text_file(
            path, fsts::detail::components_csv(prep.aligned[i], prep.decompositions[i]));
        std::cout << path.string() << "\n";
    }
    if (!only_series.empty() && !matched)
        throw fsts::malformed_input("decompose: no series named '" + only_series + "'");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fsts: Fisher-Shannon plane estimation and complexity-invariant distance "
                 "clustering for uniformly sampled time series"};
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand(
        "analyze", "run the full pipeline (ingest, STL, FS plane, clustering) from a config file");
    std::string config_path;
    analyze->add_option("--config", config_path, "key-value config file")->required();

    auto* fsplane = app.add_subcommand(
        "fsplane", "compute Fisher-Shannon plane coordinates for every series in a CSV");
    prep_options fsplane_opt;
    add_prep_options(fsplane, fsplane_opt);
    std::size_t grid_points = 4096;
    std::string fsplane_output;
    fsplane->add_option("--grid-points", grid_points, "quadrature grid size");
    fsplane->add_flag("--standardize", fsplane_opt.standardize,
                      "scale each remainder to unit variance before estimation");
    fsplane->add_option("--output", fsplane_output, "output JSON path ('-' = stdout)");

    auto* cluster = app.add_subcommand(
        "cluster", "CID distance matrix and silhouette-selected k-medoids clustering");
    prep_options cluster_opt;
    add_prep_options(cluster, cluster_opt);
    std::size_t k_min = 2, k_max = 10, restarts = 20;
    std::uint64_t seed = 1;
    std::string cluster_output, matrix_output;
    cluster->add_option("--k-min", k_min, "smallest cluster count to try");
    cluster->add_option("--k-max", k_max, "largest cluster count to try");
    cluster->add_option("--restarts", restarts, "random initializations per k");
    cluster->add_option("--seed", seed, "RNG seed");
    cluster->add_option("--output", cluster_output, "clustering JSON path ('-' = stdout)");
    cluster->add_option("--matrix-output", matrix_output, "also write the distance matrix CSV");

    auto* decompose = app.add_subcommand(
        "decompose", "dump STL components (timestamp, trend, seasonal, remainder) per series");
    prep_options decompose_opt;
    add_prep_options(decompose, decompose_opt);
    std::string output_dir = ".", only_series;
    decompose->add_option("--output-dir", output_dir, "directory for <id>_stl.csv files");
    decompose->add_option("--series", only_series, "restrict to one series id");

    CLI11_PARSE(app, argc, argv);

    try {
        if (auto workers = workers_from_env()) fsts::set_max_workers(*workers);
        if (app.got_subcommand(analyze)) return run_analyze(config_path);
        if (app.got_subcommand(fsplane))
            return run_fsplane(fsplane_opt, grid_points, fsplane_output);
        if (app.got_subcommand(cluster))
            return run_cluster(cluster_opt, k_min, k_max, seed, restarts, cluster_output,
                               matrix_output);
        if (app.got_subcommand(decompose))
            return run_decompose(decompose_opt, output_dir, only_series);
    } catch (const std::exception& e) {
        std::cerr << "error: " << fsts::error_type_name(e) << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
