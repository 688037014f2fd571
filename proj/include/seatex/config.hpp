#ifndef SEATEX_CONFIG_HPP
#define SEATEX_CONFIG_HPP

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "seatex/clustering.hpp"
#include "seatex/features.hpp"
#include "seatex/selection.hpp"
#include "seatex/synthetic.hpp"
#include "seatex/validity.hpp"

namespace seatex {

inline constexpr const char* kToolName = "seatex";
inline constexpr const char* kToolVersion = "0.1.0";

/// Appended pseudo-feature columns of seeded standard-normal noise, used for
/// selection benchmarks on synthetic scenes.
struct NoiseColumns {
    int count = 0;
    std::uint64_t seed = 0;
};

struct BaselineConfig {
    int k = 3;
    int subsets = 10;
    std::uint64_t seed = 0;
    std::vector<std::string> pool; // empty = whole feature bank
};

/// Everything one batch run needs; parsed from a single JSON config file.
struct RunConfig {
    std::string mode = "fit"; // fit | select | grid | baseline | features
    std::string input_path;
    std::string mask_path;
    std::optional<SceneSpec> synthetic;
    std::uint64_t synthetic_seed = 0;

    int sp_target_count = 500;
    double sp_compactness = 0.1;
    int sp_max_iters = 10;
    bool sp_debug = false;

    std::vector<FeatureSpec> feature_bank;
    NoiseColumns noise_columns;

    SolverConfig solver;
    IndexKind index = IndexKind::xb;
    int n_seeds = 5;

    GridSpec grid;
    BaselineConfig baseline;

    std::string out_dir = "out";
};

namespace detail {

using nlohmann::json;

inline GridRange grid_range_from_json(const json& j) {
    GridRange r;
    r.first = j.at("first").get<double>();
    r.last = j.at("last").get<double>();
    r.step = j.at("step").get<double>();
    return r;
}

inline json grid_range_to_json(const GridRange& r) {
    return json{{"first", r.first}, {"last", r.last}, {"step", r.step}};
}

inline SceneSpec scene_from_json(const json& j) {
    SceneSpec spec;
    spec.width = j.value("width", 128);
    spec.height = j.value("height", 128);
    spec.boundary_softness = j.value("boundary_softness", 0.0);
    for (const auto& rj : j.at("regions")) {
        SceneRegion region;
        if (rj.contains("rect")) {
            const auto& r = rj.at("rect");
            region.polygon = rect_polygon(r.at(0).get<double>(), r.at(1).get<double>(),
                                          r.at(2).get<double>(), r.at(3).get<double>());
        } else {
            for (const auto& v : rj.at("polygon"))
                region.polygon.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        }
        region.kind = texture_from_name(rj.at("texture").get<std::string>());
        if (rj.contains("params")) {
            const auto& pj = rj.at("params");
            region.params.level = pj.value("level", region.params.level);
            region.params.amplitude = pj.value("amplitude", region.params.amplitude);
            region.params.frequency = pj.value("frequency", region.params.frequency);
            region.params.orientation = pj.value("orientation", region.params.orientation);
            region.params.noise = pj.value("noise", region.params.noise);
        }
        spec.regions.push_back(std::move(region));
    }
    if (j.contains("outliers"))
        for (const auto& oj : j.at("outliers")) {
            OutlierBlob blob;
            blob.row = oj.at("row").get<double>();
            blob.col = oj.at("col").get<double>();
            blob.radius = oj.value("radius", 3.0);
            blob.intensity = oj.value("intensity", 1.0);
            spec.outliers.push_back(blob);
        }
    return spec;
}

inline json scene_to_json(const SceneSpec& spec, std::uint64_t seed) {
    json regions = json::array();
    for (const auto& region : spec.regions) {
        json poly = json::array();
        for (const auto& v : region.polygon) poly.push_back({v[0], v[1]});
        const char* kind = region.kind == TextureKind::flat     ? "flat"
                           : region.kind == TextureKind::ripple ? "ripple"
                                                                : "speckle";
        regions.push_back({{"polygon", poly},
                           {"texture", kind},
                           {"params",
                            {{"level", region.params.level},
                             {"amplitude", region.params.amplitude},
                             {"frequency", region.params.frequency},
                             {"orientation", region.params.orientation},
                             {"noise", region.params.noise}}}});
    }
    json outliers = json::array();
    for (const auto& blob : spec.outliers)
        outliers.push_back({{"row", blob.row},
                            {"col", blob.col},
                            {"radius", blob.radius},
                            {"intensity", blob.intensity}});
    return json{{"width", spec.width},
                {"height", spec.height},
                {"boundary_softness", spec.boundary_softness},
                {"seed", seed},
                {"regions", regions},
                {"outliers", outliers}};
}

} // namespace detail

inline nlohmann::json config_to_json(const RunConfig& cfg) {
    using nlohmann::json;
    json j;
    j["mode"] = cfg.mode;
    if (!cfg.input_path.empty() || !cfg.synthetic) {
        j["input"] = json{{"path", cfg.input_path}};
        if (!cfg.mask_path.empty()) j["input"]["mask"] = cfg.mask_path;
    }
    if (cfg.synthetic) j["synthetic"] = detail::scene_to_json(*cfg.synthetic, cfg.synthetic_seed);
    j["superpixels"] = json{{"target_count", cfg.sp_target_count},
                            {"compactness", cfg.sp_compactness},
                            {"max_iters", cfg.sp_max_iters},
                            {"debug", cfg.sp_debug}};
    json bank = json::array();
    for (const auto& spec : cfg.feature_bank) {
        json f{{"name", spec.name}};
        if (!spec.params.empty()) f["params"] = spec.params;
        bank.push_back(std::move(f));
    }
    j["features"] = bank;
    if (cfg.noise_columns.count > 0)
        j["noise_columns"] = json{{"count", cfg.noise_columns.count},
                                  {"seed", cfg.noise_columns.seed}};
    j["solver"] = json{{"algorithm", algorithm_name(cfg.solver.algorithm)},
                       {"clusters", cfg.solver.clusters},
                       {"a", cfg.solver.a},
                       {"b", cfg.solver.b},
                       {"m", cfg.solver.m},
                       {"q", cfg.solver.q},
                       {"epsilon", cfg.solver.epsilon},
                       {"max_iters", cfg.solver.max_iters},
                       {"seed", cfg.solver.seed}};
    j["selection"] = json{{"index", index_name(cfg.index)}, {"n_seeds", cfg.n_seeds}};
    j["grid"] = json{{"a", detail::grid_range_to_json(cfg.grid.a)},
                     {"m", detail::grid_range_to_json(cfg.grid.m)},
                     {"q", detail::grid_range_to_json(cfg.grid.q)},
                     {"b_factor", cfg.grid.b_factor}};
    if (cfg.grid.b) j["grid"]["b"] = detail::grid_range_to_json(*cfg.grid.b);
    j["baseline"] = json{{"k", cfg.baseline.k},
                         {"subsets", cfg.baseline.subsets},
                         {"seed", cfg.baseline.seed}};
    if (!cfg.baseline.pool.empty()) j["baseline"]["pool"] = cfg.baseline.pool;
    j["output"] = json{{"dir", cfg.out_dir}};
    return j;
}

inline RunConfig config_from_json(const nlohmann::json& root) {
    using nlohmann::json;
    // a manifest embeds the effective config under "config"
    const json& j = root.contains("config") ? root.at("config") : root;

    RunConfig cfg;
    cfg.mode = j.value("mode", std::string("fit"));
    if (j.contains("input")) {
        cfg.input_path = j.at("input").value("path", std::string());
        cfg.mask_path = j.at("input").value("mask", std::string());
    }
    if (j.contains("synthetic")) {
        cfg.synthetic = detail::scene_from_json(j.at("synthetic"));
        cfg.synthetic_seed = j.at("synthetic").value("seed", 0ULL);
    }
    if (j.contains("superpixels")) {
        const auto& s = j.at("superpixels");
        cfg.sp_target_count = s.value("target_count", cfg.sp_target_count);
        cfg.sp_compactness = s.value("compactness", cfg.sp_compactness);
        cfg.sp_max_iters = s.value("max_iters", cfg.sp_max_iters);
        cfg.sp_debug = s.value("debug", cfg.sp_debug);
    }
    if (j.contains("features")) {
        for (const auto& fj : j.at("features")) {
            FeatureSpec spec;
            spec.name = fj.at("name").get<std::string>();
            if (fj.contains("params"))
                for (auto it = fj.at("params").begin(); it != fj.at("params").end(); ++it)
                    spec.params[it.key()] = it.value().get<double>();
            cfg.feature_bank.push_back(std::move(spec));
        }
    } else {
        for (const auto& name : registered_features()) cfg.feature_bank.push_back({name, {}});
    }
    if (j.contains("noise_columns")) {
        cfg.noise_columns.count = j.at("noise_columns").value("count", 0);
        cfg.noise_columns.seed = j.at("noise_columns").value("seed", 0ULL);
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        cfg.solver.algorithm = algorithm_from_name(s.value("algorithm", std::string("pflicm")));
        cfg.solver.clusters = s.value("clusters", cfg.solver.clusters);
        cfg.solver.a = s.value("a", cfg.solver.a);
        cfg.solver.b = s.value("b", cfg.solver.b);
        cfg.solver.m = s.value("m", cfg.solver.m);
        cfg.solver.q = s.value("q", cfg.solver.q);
        cfg.solver.epsilon = s.value("epsilon", cfg.solver.epsilon);
        cfg.solver.max_iters = s.value("max_iters", cfg.solver.max_iters);
        cfg.solver.seed = s.value("seed", 0ULL);
    }
    if (j.contains("selection")) {
        cfg.index = index_from_name(j.at("selection").value("index", std::string("xb")));
        cfg.n_seeds = j.at("selection").value("n_seeds", cfg.n_seeds);
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("a")) cfg.grid.a = detail::grid_range_from_json(g.at("a"));
        if (g.contains("m")) cfg.grid.m = detail::grid_range_from_json(g.at("m"));
        if (g.contains("q")) cfg.grid.q = detail::grid_range_from_json(g.at("q"));
        cfg.grid.b_factor = g.value("b_factor", cfg.grid.b_factor);
        if (g.contains("b")) cfg.grid.b = detail::grid_range_from_json(g.at("b"));
    }
    if (j.contains("baseline")) {
        const auto& b = j.at("baseline");
        cfg.baseline.k = b.value("k", cfg.baseline.k);
        cfg.baseline.subsets = b.value("subsets", cfg.baseline.subsets);
        cfg.baseline.seed = b.value("seed", 0ULL);
        if (b.contains("pool"))
            cfg.baseline.pool = b.at("pool").get<std::vector<std::string>>();
    }
    if (j.contains("output")) cfg.out_dir = j.at("output").value("dir", cfg.out_dir);
    return cfg;
}

/// Validates cross-field invariants that JSON parsing alone cannot catch.
inline void validate_config(const RunConfig& cfg) {
    static const std::vector<std::string> modes = {"fit", "select", "grid", "baseline",
                                                   "features"};
    if (std::find(modes.begin(), modes.end(), cfg.mode) == modes.end())
        throw std::invalid_argument("unknown mode: " + cfg.mode);
    if (cfg.input_path.empty() && !cfg.synthetic)
        throw std::invalid_argument("config needs an input path or a synthetic scene");
    if (cfg.feature_bank.empty()) throw std::invalid_argument("feature bank is empty");
    for (const auto& spec : cfg.feature_bank)
        if (!is_registered_feature(spec.name))
            throw std::invalid_argument("unknown feature in config: " + spec.name);
    for (const auto& name : cfg.baseline.pool) {
        bool known = is_registered_feature(name);
        for (int i = 0; i < cfg.noise_columns.count && !known; ++i)
            known = name == "noise" + std::to_string(i);
        if (!known) throw std::invalid_argument("unknown feature in baseline pool: " + name);
    }
    if (cfg.n_seeds < 1) throw std::invalid_argument("n_seeds must be >= 1");
    if (cfg.noise_columns.count < 0) throw std::invalid_argument("noise column count must be >= 0");
    if (cfg.index == IndexKind::vxb && !is_possibilistic(cfg.solver.algorithm))
        throw std::invalid_argument("vxb requires a possibilistic algorithm (pfcm/pflicm)");
}

/// Loads and validates a run config. A manifest file from a previous run is
/// accepted as-is, so any run can be replayed from its manifest alone.
inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    RunConfig cfg = config_from_json(j);
    validate_config(cfg);
    return cfg;
}

} // namespace seatex

#endif
