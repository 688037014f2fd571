#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seatex/pipeline.hpp"
#include "test_util.hpp"

using namespace seatex;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string scene_config_json(const std::string& out_dir, const std::string& features) {
    return R"({
      "synthetic": {
        "width": 48, "height": 48, "seed": 5,
        "regions": [
          {"rect": [0, 0, 16, 48], "texture": "flat", "params": {"level": 0.3, "noise": 0.02}},
          {"rect": [16, 0, 32, 48], "texture": "ripple",
           "params": {"level": 0.55, "amplitude": 0.25, "frequency": 0.18, "noise": 0.02}},
          {"rect": [32, 0, 48, 48], "texture": "speckle", "params": {"level": 0.5}}
        ]
      },
      "superpixels": {"target_count": 40, "compactness": 0.1, "max_iters": 5},
      "features": [)" +
           features + R"(],
      "solver": {"algorithm": "pflicm", "clusters": 3, "a": 14, "b": 1.4, "m": 1.8, "q": 2.8,
                 "epsilon": 1e-6, "max_iters": 15, "seed": 3},
      "selection": {"index": "xb", "n_seeds": 2},
      "output": {"dir": ")" +
           out_dir + R"("}
    })";
}

RunConfig config_from_text(const std::string& text) {
    const std::string path = testutil::tmp_path("cfg.json");
    std::ofstream(path) << text;
    return load_config(path);
}

} // namespace

TEST_CASE("fit mode writes per-cluster maps and the summaries", "[pipeline]") {
    const fs::path dir = testutil::tmp_dir() / "fit_run";
    RunConfig cfg = config_from_text(scene_config_json(
        dir.string(), R"({"name": "mean"}, {"name": "variance"})"));
    cfg.mode = "fit";
    REQUIRE(pipeline::run(cfg) == 0);

    for (int c = 0; c < 3; ++c) {
        CHECK(fs::exists(dir / ("membership_c" + std::to_string(c) + ".png")));
        CHECK(fs::exists(dir / ("typicality_c" + std::to_string(c) + ".png")));
        CHECK(fs::exists(dir / ("product_c" + std::to_string(c) + ".png")));
    }
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "validity.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "truth.png"));

    const auto summary = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(summary.at("algorithm") == "pflicm");
    CHECK(summary.at("centers").size() == 3);
    CHECK(summary.at("scores").contains("xb"));
    CHECK(summary.at("scores").contains("vxb"));
}

TEST_CASE("membership maps are omitted typicality for crisp algorithms", "[pipeline]") {
    const fs::path dir = testutil::tmp_dir() / "fit_kmeans";
    RunConfig cfg = config_from_text(scene_config_json(
        dir.string(), R"({"name": "mean"})"));
    cfg.mode = "fit";
    cfg.solver.algorithm = Algorithm::kmeans;
    REQUIRE(pipeline::run(cfg) == 0);
    CHECK(fs::exists(dir / "membership_c0.png"));
    CHECK_FALSE(fs::exists(dir / "typicality_c0.png"));
    CHECK_FALSE(fs::exists(dir / "product_c0.png"));
}

TEST_CASE("select mode records every candidate evaluation", "[pipeline]") {
    const fs::path dir = testutil::tmp_dir() / "select_run";
    RunConfig cfg = config_from_text(scene_config_json(
        dir.string(),
        R"({"name": "mean"}, {"name": "variance"}, {"name": "sobel"}, {"name": "lbp"})"));
    cfg.mode = "select";
    REQUIRE(pipeline::run(cfg) == 0);

    const auto trace = nlohmann::json::parse(read_file(dir / "selection_trace.json"));
    int candidates = 0;
    for (const auto& step : trace.at("steps")) candidates += step.at("candidates").size();
    CHECK(candidates == 4 + 3 + 2 + 1);
    CHECK(trace.at("chosen_path").size() == 4);

    const std::string csv = read_file(dir / "selection_scores.csv");
    CHECK(csv.starts_with("n_features,feature_added,mean,std\n"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5); // header + 4 steps
}

TEST_CASE("an invalid feature name fails fast with no partial outputs", "[pipeline]") {
    const fs::path dir = testutil::tmp_dir() / "invalid_run";
    const std::string text =
        scene_config_json(dir.string(), R"({"name": "mean"}, {"name": "bogus"})");
    const std::string path = testutil::tmp_path("bad_cfg.json");
    std::ofstream(path) << text;
    CHECK_THROWS_WITH(load_config(path), Catch::Matchers::ContainsSubstring("bogus"));

    // even a hand-built config with a bad name must not write anything
    RunConfig cfg = config_from_text(scene_config_json(dir.string(), R"({"name": "mean"})"));
    cfg.feature_bank.push_back({"bogus", {}});
    cfg.mode = "fit";
    CHECK(pipeline::run(cfg) != 0);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("features mode dumps the matrix as CSV with named header", "[pipeline]") {
    const fs::path dir = testutil::tmp_dir() / "features_run";
    RunConfig cfg = config_from_text(scene_config_json(
        dir.string(), R"({"name": "mean"}, {"name": "variance"})"));
    cfg.mode = "features";
    cfg.noise_columns = {2, 9};
    REQUIRE(pipeline::run(cfg) == 0);

    const std::string csv = read_file(dir / "features.csv");
    CHECK(csv.starts_with("mean,variance,noise0,noise1\n"));
}

TEST_CASE("identical configs produce byte-identical CSV and JSON outputs", "[pipeline]") {
    const fs::path dir_a = testutil::tmp_dir() / "det_a";
    const fs::path dir_b = testutil::tmp_dir() / "det_b";
    const std::string features = R"({"name": "mean"}, {"name": "variance"})";

    RunConfig a = config_from_text(scene_config_json(dir_a.string(), features));
    a.mode = "select";
    RunConfig b = config_from_text(scene_config_json(dir_b.string(), features));
    b.mode = "select";
    REQUIRE(pipeline::run(a) == 0);
    REQUIRE(pipeline::run(b) == 0);

    CHECK(read_file(dir_a / "selection_trace.json") == read_file(dir_b / "selection_trace.json"));
    CHECK(read_file(dir_a / "selection_scores.csv") == read_file(dir_b / "selection_scores.csv"));
}

TEST_CASE("a manifest alone replays the run", "[pipeline]") {
    const fs::path dir_a = testutil::tmp_dir() / "replay_a";
    const fs::path dir_b = testutil::tmp_dir() / "replay_b";
    RunConfig cfg = config_from_text(scene_config_json(dir_a.string(), R"({"name": "mean"})"));
    cfg.mode = "fit";
    REQUIRE(pipeline::run(cfg) == 0);

    RunConfig replay = load_config((dir_a / "manifest.json").string());
    CHECK(replay.mode == "fit");
    replay.out_dir = dir_b.string();
    REQUIRE(pipeline::run(replay) == 0);

    CHECK(read_file(dir_a / "summary.json") == read_file(dir_b / "summary.json"));
    CHECK(read_file(dir_a / "validity.csv") == read_file(dir_b / "validity.csv"));
}

TEST_CASE("baseline mode scores deterministic random subsets", "[pipeline]") {
    const fs::path dir = testutil::tmp_dir() / "baseline_run";
    RunConfig cfg = config_from_text(scene_config_json(
        dir.string(), R"({"name": "mean"}, {"name": "variance"}, {"name": "sobel"})"));
    cfg.mode = "baseline";
    cfg.baseline.k = 2;
    cfg.baseline.subsets = 3;
    cfg.baseline.seed = 7;
    REQUIRE(pipeline::run(cfg) == 0);

    const auto baseline = nlohmann::json::parse(read_file(dir / "baseline.json"));
    REQUIRE(baseline.at("draws").size() == 3);
    for (const auto& draw : baseline.at("draws")) CHECK(draw.at("subset").size() == 2);
}

TEST_CASE("grid mode writes cells sorted by mean score", "[pipeline]") {
    const fs::path dir = testutil::tmp_dir() / "grid_run";
    RunConfig cfg = config_from_text(scene_config_json(dir.string(), R"({"name": "mean"})"));
    cfg.mode = "grid";
    cfg.grid.a = {4.0, 8.0, 4.0};
    cfg.grid.m = {1.8, 2.1, 0.3};
    cfg.grid.q = {2.8, 2.8, 1.0};
    cfg.n_seeds = 1;
    REQUIRE(pipeline::run(cfg) == 0);

    const auto results = nlohmann::json::parse(read_file(dir / "grid_results.json"));
    REQUIRE(results.at("cells").size() == 4);
    double prev = -1.0;
    for (const auto& cell : results.at("cells")) {
        const double mean = cell.at("mean").get<double>();
        CHECK(mean >= prev);
        prev = mean;
    }
}
