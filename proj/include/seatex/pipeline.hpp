#ifndef SEATEX_PIPELINE_HPP
#define SEATEX_PIPELINE_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "seatex/config.hpp"
#include "seatex/raster.hpp"
#include "seatex/selection.hpp"
#include "seatex/superpixel.hpp"
#include "seatex/synthetic.hpp"
#include "seatex/validity.hpp"

namespace seatex::pipeline {

namespace detail {

using nlohmann::json;

// %.17g round-trips doubles exactly and keeps CSV output byte-stable.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// Per-superpixel values projected back through the label image.
inline std::vector<double> project_to_pixels(const std::vector<double>& per_superpixel,
                                             const SuperpixelMap& map) {
    std::vector<double> out(map.labels.size(), 0.0);
    for (std::size_t i = 0; i < map.labels.size(); ++i)
        if (map.labels[i] >= 0) out[i] = per_superpixel[map.labels[i]];
    return out;
}

inline json validity_to_json(const ValidityScore& s) {
    return json{{"kind", index_name(s.index_kind)}, {"value", s.value},
                {"numerator", s.numerator},        {"denominator", s.denominator},
                {"n_points", s.n_points},          {"nonzero_terms", s.nonzero_terms}};
}

inline std::string validity_csv_row(const ValidityScore& s) {
    return index_name(s.index_kind) + "," + fmt(s.value) + "," + fmt(s.numerator) + "," +
           fmt(s.denominator) + "," + std::to_string(s.n_points) + "," +
           std::to_string(s.nonzero_terms) + "\n";
}

inline json candidate_to_json(const CandidateScore& c) {
    return json{{"subset", c.subset},
                {"per_seed_scores", c.per_seed_scores},
                {"mean", c.mean},
                {"std", c.stddev}};
}

} // namespace detail

/// Everything the pipeline derived from the config before mode dispatch.
struct PipelineData {
    Raster raster;
    std::vector<int> truth_labels; // synthetic scenes only
    SuperpixelMap superpixels;
    FeatureMatrix features;
    std::vector<std::uint64_t> seeds_used;
};

/// Appends `count` standardized standard-normal columns named noise<i>.
inline void append_noise_columns(FeatureMatrix& fm, int count, std::uint64_t seed) {
    if (count <= 0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix values(fm.values.rows, fm.values.cols + count);
    for (int r = 0; r < fm.values.rows; ++r)
        for (int c = 0; c < fm.values.cols; ++c) values(r, c) = fm.values(r, c);
    Matrix noise(fm.values.rows, count);
    for (int c = 0; c < count; ++c)
        for (int r = 0; r < fm.values.rows; ++r) noise(r, c) = gauss(rng);
    const auto stats = standardize_columns(noise);
    for (int c = 0; c < count; ++c) {
        for (int r = 0; r < fm.values.rows; ++r) values(r, fm.values.cols + c) = noise(r, c);
        fm.names.push_back("noise" + std::to_string(c));
        fm.standardization.push_back(stats[c]);
    }
    fm.values = std::move(values);
}

namespace detail {

inline void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg,
                           const std::vector<std::uint64_t>& seeds) {
    json manifest;
    manifest["tool"] = kToolName;
    manifest["version"] = kToolVersion;
    manifest["mode"] = cfg.mode;
    manifest["seeds"] = seeds;
    manifest["config"] = config_to_json(cfg);
    write_json(dir / "manifest.json", manifest);
}

inline void write_partition_maps(const std::filesystem::path& dir, const Partition& p,
                                 const PipelineData& data) {
    const int clusters = p.centers.rows;
    const int n = p.memberships.cols;
    for (int c = 0; c < clusters; ++c) {
        std::vector<double> u(n), t(n), product(n);
        for (int i = 0; i < n; ++i) {
            u[i] = p.memberships(c, i);
            t[i] = p.typicalities(c, i);
            product[i] = u[i] * t[i];
        }
        const std::string suffix = "_c" + std::to_string(c) + ".png";
        write_map(project_to_pixels(u, data.superpixels), data.raster,
                  (dir / ("membership" + suffix)).string());
        if (p.possibilistic) {
            write_map(project_to_pixels(t, data.superpixels), data.raster,
                      (dir / ("typicality" + suffix)).string());
            write_map(project_to_pixels(product, data.superpixels), data.raster,
                      (dir / ("product" + suffix)).string());
        }
    }
}

inline json partition_summary(const Partition& p, const SolverConfig& cfg) {
    json centers = json::array();
    for (int c = 0; c < p.centers.rows; ++c) {
        json row = json::array();
        for (int j = 0; j < p.centers.cols; ++j) row.push_back(p.centers(c, j));
        centers.push_back(std::move(row));
    }
    return json{{"algorithm", algorithm_name(cfg.algorithm)},
                {"clusters", p.centers.rows},
                {"centers", centers},
                {"gammas", p.gammas},
                {"iterations_run", p.iterations_run},
                {"converged", p.converged}};
}

inline void run_fit(const std::filesystem::path& dir, const RunConfig& cfg, PipelineData& data) {
    const SuperpixelMap* graph = &data.superpixels;
    const Partition p = fit(data.features, graph, cfg.solver);
    write_partition_maps(dir, p, data);

    json summary = partition_summary(p, cfg.solver);
    std::string csv = "kind,value,numerator,denominator,n_points,nonzero_terms\n";
    if (p.centers.rows >= 2) {
        const ValidityScore sx = xb(data.features, p);
        summary["scores"]["xb"] = validity_to_json(sx);
        csv += validity_csv_row(sx);
        if (p.possibilistic) {
            const ValidityScore sv = vxb(data.features, p);
            summary["scores"]["vxb"] = validity_to_json(sv);
            csv += validity_csv_row(sv);
        }
    }
    write_json(dir / "summary.json", summary);
    write_text(dir / "validity.csv", csv);
    data.seeds_used = {cfg.solver.seed};
}

inline void run_select(const std::filesystem::path& dir, const RunConfig& cfg,
                       PipelineData& data) {
    const SelectionTrace trace =
        forward_select(data.features, &data.superpixels, cfg.solver, cfg.index, cfg.n_seeds);

    json steps = json::array();
    for (const auto& step : trace.steps) {
        json candidates = json::array();
        for (const auto& c : step.candidates) candidates.push_back(candidate_to_json(c));
        steps.push_back({{"candidates", candidates},
                         {"accepted", step.candidates[step.accepted].subset.back()},
                         {"accepted_mean", step.candidates[step.accepted].mean}});
    }
    json trace_json{{"index", index_name(cfg.index)},
                    {"n_seeds", cfg.n_seeds},
                    {"base_seed", cfg.solver.seed},
                    {"steps", steps},
                    {"chosen_path", trace.chosen_path},
                    {"step_means", trace.step_means},
                    {"best_subset", trace.best_subset},
                    {"best_mean", trace.best_mean}};
    write_json(dir / "selection_trace.json", trace_json);

    std::string csv = "n_features,feature_added,mean,std\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& c = trace.steps[i].candidates[trace.steps[i].accepted];
        csv += std::to_string(i + 1) + "," + trace.chosen_path[i] + "," + fmt(c.mean) + "," +
               fmt(c.stddev) + "\n";
    }
    write_text(dir / "selection_scores.csv", csv);

    data.seeds_used.clear();
    for (int s = 0; s < cfg.n_seeds; ++s) data.seeds_used.push_back(cfg.solver.seed + s);
}

inline void run_grid(const std::filesystem::path& dir, const RunConfig& cfg,
                     PipelineData& data) {
    const std::vector<GridCell> cells =
        grid_search(data.features, &data.superpixels, cfg.solver, cfg.grid, cfg.index,
                    cfg.n_seeds);

    json cells_json = json::array();
    std::string csv = "a,b,m,q,mean,std\n";
    for (const auto& cell : cells) {
        cells_json.push_back({{"a", cell.a},
                              {"b", cell.b},
                              {"m", cell.m},
                              {"q", cell.q},
                              {"per_seed_scores", cell.per_seed_scores},
                              {"mean", cell.mean},
                              {"std", cell.stddev}});
        csv += fmt(cell.a) + "," + fmt(cell.b) + "," + fmt(cell.m) + "," + fmt(cell.q) + "," +
               fmt(cell.mean) + "," + fmt(cell.stddev) + "\n";
    }
    write_json(dir / "grid_results.json",
               json{{"index", index_name(cfg.index)},
                    {"n_seeds", cfg.n_seeds},
                    {"base_seed", cfg.solver.seed},
                    {"cells", cells_json}});
    write_text(dir / "grid_results.csv", csv);

    data.seeds_used.clear();
    for (int s = 0; s < cfg.n_seeds; ++s) data.seeds_used.push_back(cfg.solver.seed + s);
}

inline void run_baseline(const std::filesystem::path& dir, const RunConfig& cfg,
                         PipelineData& data) {
    const std::vector<std::string> pool =
        cfg.baseline.pool.empty() ? data.features.names : cfg.baseline.pool;

    json draws = json::array();
    std::string csv = "subset,mean,std\n";
    for (int i = 0; i < cfg.baseline.subsets; ++i) {
        const std::vector<std::string> subset =
            random_baseline(pool, cfg.baseline.k, cfg.baseline.seed + i);
        const CandidateScore score = score_subset(data.features, subset, &data.superpixels,
                                                  cfg.solver, cfg.index, cfg.n_seeds);
        draws.push_back(candidate_to_json(score));
        csv += join(subset, ";") + "," + fmt(score.mean) + "," + fmt(score.stddev) + "\n";
    }
    write_json(dir / "baseline.json",
               json{{"index", index_name(cfg.index)},
                    {"k", cfg.baseline.k},
                    {"pool", pool},
                    {"baseline_seed", cfg.baseline.seed},
                    {"draws", draws}});
    write_text(dir / "baseline.csv", csv);

    data.seeds_used.clear();
    for (int s = 0; s < cfg.n_seeds; ++s) data.seeds_used.push_back(cfg.solver.seed + s);
}

inline void write_features_csv(const std::filesystem::path& path, const FeatureMatrix& fm) {
    std::string csv = join(fm.names, ",") + "\n";
    for (int r = 0; r < fm.values.rows; ++r) {
        for (int c = 0; c < fm.values.cols; ++c) {
            if (c) csv += ",";
            csv += fmt(fm.values(r, c));
        }
        csv += "\n";
    }
    write_text(path, csv);
}

} // namespace detail

/// Executes one batch run. Returns 0 on success; on failure prints a
/// diagnostic naming the failed stage and returns 1.
inline int run(const RunConfig& cfg) {
    std::string stage = "config";
    try {
        validate_config(cfg);

        const std::filesystem::path dir(cfg.out_dir);
        std::filesystem::create_directories(dir);

        stage = "input";
        PipelineData data;
        if (cfg.synthetic) {
            Scene scene = generate(*cfg.synthetic, cfg.synthetic_seed);
            data.raster = std::move(scene.raster);
            data.truth_labels = std::move(scene.labels);
            Scene truth{data.raster, data.truth_labels};
            write_labels(truth, (dir / "truth.png").string());
        } else {
            data.raster = load_raster(cfg.input_path, cfg.mask_path);
        }

        stage = "superpixel";
        data.superpixels = slic(data.raster, cfg.sp_target_count, cfg.sp_compactness,
                                cfg.sp_max_iters);
        if (cfg.sp_debug) {
            write_labels_png(data.superpixels, (dir / "superpixels_labels.png").string());
            write_boundary_overlay(data.superpixels, data.raster,
                                   (dir / "superpixels_boundary.png").string());
        }

        stage = "features";
        std::vector<std::vector<double>> maps;
        std::vector<std::string> names;
        for (const auto& spec : cfg.feature_bank) {
            maps.push_back(extract(data.raster, spec));
            names.push_back(spec.name);
        }
        data.features = aggregate(maps, names, data.superpixels);
        append_noise_columns(data.features, cfg.noise_columns.count, cfg.noise_columns.seed);

        if (cfg.mode == "features") {
            stage = "output";
            detail::write_features_csv(dir / "features.csv", data.features);
            data.seeds_used = {};
        } else if (cfg.mode == "fit") {
            stage = "clustering";
            detail::run_fit(dir, cfg, data);
        } else if (cfg.mode == "select") {
            stage = "selection";
            detail::run_select(dir, cfg, data);
        } else if (cfg.mode == "grid") {
            stage = "grid";
            detail::run_grid(dir, cfg, data);
        } else if (cfg.mode == "baseline") {
            stage = "baseline";
            detail::run_baseline(dir, cfg, data);
        }

        stage = "output";
        detail::write_manifest(dir, cfg, data.seeds_used);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << kToolName << ": error in " << stage << " stage: " << e.what() << "\n";
        return 1;
    }
}

} // namespace seatex::pipeline

#endif
