#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsts/config.hpp"
#include "fsts/svg.hpp"

using namespace fsts;

namespace {

run_config parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

} // namespace

TEST_CASE("config: defaults materialize from a minimal file") {
    auto cfg = parse("input.NO2 = data/no2.csv\n");
    REQUIRE(cfg.inputs.size() == 1);
    CHECK(cfg.inputs[0].first == "NO2");
    CHECK(cfg.max_gap == 6);
    CHECK(cfg.stl.period == 24);
    CHECK(cfg.stl.seasonal_window == stl_params::periodic);
    CHECK(cfg.stl.resolved_trend_window() == 37); // next odd >= 1.5 * 24
    CHECK(cfg.stl.resolved_lowpass_window() == 25);
    CHECK(cfg.stl.inner_iterations == 2);
    CHECK(cfg.stl.outer_iterations == 0);
    CHECK(cfg.grid_points == 4096);
    CHECK_FALSE(cfg.standardize);
    CHECK(cfg.k_min == 2);
    CHECK(cfg.k_max == 10);
    CHECK(cfg.restarts == 20);
    CHECK(cfg.emit_svg);
}

TEST_CASE("config: comments, blank lines and overrides") {
    auto cfg = parse("# run settings\n"
                     "\n"
                     "input.O3 = o3.csv\n"
                     "input.PM25 = pm.csv\n"
                     "max_gap = 12\n"
                     "stl.seasonal_window = 35\n"
                     "stl.trend_window = 101\n"
                     "kde.standardize = true\n"
                     "cluster.k_max = 6\n"
                     "seed = 99\n"
                     "emit.svg = false\n");
    CHECK(cfg.inputs.size() == 2);
    CHECK(cfg.max_gap == 12);
    CHECK(cfg.stl.seasonal_window == 35);
    CHECK(cfg.stl.resolved_trend_window() == 101);
    CHECK(cfg.standardize);
    CHECK(cfg.k_max == 6);
    CHECK(cfg.seed == 99);
    CHECK_FALSE(cfg.emit_svg);
}

TEST_CASE("config: rejections name the offending field") {
    CHECK_THROWS_AS(parse(""), config_error); // no inputs
    CHECK_THROWS_AS(parse("input.A = a.csv\nstl.seasonal_window = 8\n"), config_error);
    CHECK_THROWS_AS(parse("input.A = a.csv\nmax_gap = -1\n"), config_error);
    CHECK_THROWS_AS(parse("input.A = a.csv\nunknown_key = 1\n"), config_error);
    CHECK_THROWS_AS(parse("input.A = a.csv\nmax_gap = 3\nmax_gap = 4\n"), config_error);
    CHECK_THROWS_AS(parse("input.A = a.csv\ncluster.k_min = 5\ncluster.k_max = 3\n"),
                    config_error);
    CHECK_THROWS_AS(parse("input.A = a.csv\nstl.period = 1\n"), config_error);
    CHECK_THROWS_AS(parse("input.A = a.csv\nkde.standardize = yes\n"), config_error);
    CHECK_THROWS_AS(parse("input.A = a.csv\nnot a key value line\n"), config_error);

    try {
        parse("input.A = a.csv\nstl.seasonal_window = 8\n");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("seasonal_window") != std::string::npos);
    }
}

TEST_CASE("validate_config: missing input path fails before any computation") {
    const auto dir = std::filesystem::temp_directory_path() / "fsts_cfg_test";
    std::filesystem::create_directories(dir);
    const auto cfg_path = dir / "run.conf";
    {
        std::ofstream out(cfg_path);
        out << "input.NO2 = does_not_exist.csv\n";
    }
    CHECK_THROWS_AS(validate_config(cfg_path), config_error);

    // with the file present, paths resolve relative to the config
    {
        std::ofstream csv(dir / "does_not_exist.csv");
        csv << "timestamp,a\n2020-01-01T00:00:00Z,1\n2020-01-01T01:00:00Z,2\n";
    }
    auto cfg = validate_config(cfg_path);
    CHECK(std::filesystem::exists(cfg.inputs[0].second));
    std::filesystem::remove_all(dir);
}

TEST_CASE("svg writers produce stable, well-formed documents") {
    std::vector<fs_point_result> points;
    fs_point_result a;
    a.id = "urban<1>";
    a.sep = 12.5;
    a.fim = 0.11;
    points.push_back(a);
    fs_point_result b;
    b.id = "rural";
    b.sep = 2.0;
    b.fim = 0.9;
    points.push_back(b);
    std::vector<std::size_t> labels = {0, 1};

    auto svg = fs_plane_svg(points, labels, 2, "demo & test");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("urban&lt;1&gt;") != std::string::npos);
    CHECK(svg.find("demo &amp; test") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg == fs_plane_svg(points, labels, 2, "demo & test")); // deterministic

    std::vector<std::pair<std::size_t, double>> curve = {{2, 0.8}, {3, 0.6}, {4, 0.5}};
    auto sil = silhouette_curve_svg(curve, 2, "sil");
    CHECK(sil.rfind("<svg", 0) == 0);
    CHECK(sil.find("</svg>") != std::string::npos);
    CHECK(sil == silhouette_curve_svg(curve, 2, "sil"));
}
