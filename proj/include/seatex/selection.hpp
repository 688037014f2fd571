#ifndef SEATEX_SELECTION_HPP
#define SEATEX_SELECTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatex/clustering.hpp"
#include "seatex/features.hpp"
#include "seatex/validity.hpp"

namespace seatex {

/// One evaluated feature subset: per-seed index scores and their statistics.
struct CandidateScore {
    std::vector<std::string> subset;
    std::vector<double> per_seed_scores;
    double mean = 0.0;
    double stddev = 0.0;
};

/// One forward-selection round: every candidate tried and the accepted pick.
struct SelectionStep {
    std::vector<CandidateScore> candidates;
    int accepted = 0; // index into candidates
};

struct SelectionTrace {
    std::vector<SelectionStep> steps;
    std::vector<std::string> chosen_path; // accepted feature per step
    std::vector<double> step_means;       // accepted candidate's mean per step
    std::vector<std::string> best_subset; // prefix of chosen_path with minimal mean
    double best_mean = 0.0;
};

struct GridRange {
    double first = 0.0;
    double last = 0.0;
    double step = 1.0;
};

/// Grid axes for a, m, q. b follows b = b_factor * a unless an explicit b
/// range overrides the tie rule.
struct GridSpec {
    GridRange a{2.0, 12.0, 2.0};
    GridRange m{1.2, 3.0, 0.3};
    GridRange q{1.2, 2.8, 0.2};
    double b_factor = 0.1;
    std::optional<GridRange> b;
};

struct GridCell {
    double a = 0.0, b = 0.0, m = 0.0, q = 0.0;
    std::vector<double> per_seed_scores;
    double mean = 0.0;
    double stddev = 0.0;
};

inline std::vector<double> grid_values(const GridRange& r) {
    if (!(r.step > 0.0)) throw std::invalid_argument("grid increment must be positive");
    if (r.last < r.first - 1e-12) throw std::invalid_argument("grid range is empty");
    const int n = static_cast<int>(std::floor((r.last - r.first) / r.step + 0.5)) + 1;
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) values[i] = r.first + i * r.step;
    return values;
}

namespace detail {

inline void finish_stats(CandidateScore& c) {
    bool any_inf = false;
    double sum = 0.0;
    for (double s : c.per_seed_scores) {
        if (!std::isfinite(s)) any_inf = true;
        sum += s;
    }
    if (any_inf || c.per_seed_scores.empty()) {
        c.mean = std::numeric_limits<double>::infinity();
        c.stddev = 0.0;
        return;
    }
    c.mean = sum / c.per_seed_scores.size();
    double var = 0.0;
    for (double s : c.per_seed_scores) var += (s - c.mean) * (s - c.mean);
    c.stddev = std::sqrt(var / c.per_seed_scores.size());
}

inline std::vector<int> columns_of(const FeatureMatrix& features,
                                   const std::vector<std::string>& names) {
    std::vector<int> cols;
    for (const auto& name : names) {
        auto it = std::find(features.names.begin(), features.names.end(), name);
        if (it == features.names.end())
            throw std::invalid_argument("feature not in matrix: " + name);
        cols.push_back(static_cast<int>(it - features.names.begin()));
    }
    return cols;
}

} // namespace detail

/// Scores a feature subset: fit + index once per seed in
/// [config.seed, config.seed + n_seeds). A degenerate clustering makes the
/// candidate's score infinite rather than aborting the search.
inline CandidateScore score_subset(const FeatureMatrix& features,
                                   const std::vector<std::string>& subset,
                                   const SuperpixelMap* graph, const SolverConfig& config,
                                   IndexKind index_kind, int n_seeds) {
    CandidateScore out;
    out.subset = subset;
    const FeatureMatrix sub = select_columns(features, detail::columns_of(features, subset));
    for (int s = 0; s < n_seeds; ++s) {
        SolverConfig cfg = config;
        cfg.seed = config.seed + static_cast<std::uint64_t>(s);
        double score;
        try {
            const Partition p = fit(sub, graph, cfg);
            score = compute_index(index_kind, sub, p).value;
        } catch (const DegenerateClusteringError&) {
            score = std::numeric_limits<double>::infinity();
        }
        out.per_seed_scores.push_back(score);
    }
    detail::finish_stats(out);
    return out;
}

/// Greedy forward selection: at every step each remaining feature is
/// appended to the accepted subset, scored as the mean index over n_seeds
/// runs, and the lowest-mean candidate is accepted; runs until the bank is
/// exhausted. Ties break by feature-bank order.
inline SelectionTrace forward_select(const FeatureMatrix& features, const SuperpixelMap* graph,
                                     const SolverConfig& config, IndexKind index_kind,
                                     int n_seeds) {
    if (n_seeds < 1) throw std::invalid_argument("n_seeds must be >= 1");
    if (index_kind == IndexKind::vxb && !is_possibilistic(config.algorithm))
        throw std::invalid_argument("vxb selection requires a possibilistic algorithm");

    SelectionTrace trace;
    std::vector<std::string> accepted;
    std::vector<std::string> remaining = features.names;

    while (!remaining.empty()) {
        SelectionStep step;
        for (const auto& name : remaining) {
            std::vector<std::string> candidate = accepted;
            candidate.push_back(name);
            step.candidates.push_back(
                score_subset(features, candidate, graph, config, index_kind, n_seeds));
        }
        step.accepted = 0;
        for (std::size_t i = 1; i < step.candidates.size(); ++i)
            if (step.candidates[i].mean < step.candidates[step.accepted].mean)
                step.accepted = static_cast<int>(i);

        const std::string picked = remaining[step.accepted];
        accepted.push_back(picked);
        remaining.erase(remaining.begin() + step.accepted);
        trace.chosen_path.push_back(picked);
        trace.step_means.push_back(step.candidates[step.accepted].mean);
        trace.steps.push_back(std::move(step));
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < trace.step_means.size(); ++i)
        if (trace.step_means[i] < trace.step_means[best]) best = i;
    trace.best_subset.assign(trace.chosen_path.begin(), trace.chosen_path.begin() + best + 1);
    trace.best_mean = trace.step_means.empty() ? 0.0 : trace.step_means[best];
    return trace;
}

/// Cartesian sweep over a x m x q (b tied to b_factor*a, or its own axis when
/// given), each cell scored like a forward-selection candidate on the full
/// feature set. Results sorted ascending by mean score.
inline std::vector<GridCell> grid_search(const FeatureMatrix& features,
                                         const SuperpixelMap* graph,
                                         const SolverConfig& base_config, const GridSpec& grid,
                                         IndexKind index_kind, int n_seeds) {
    const std::vector<double> as = grid_values(grid.a);
    const std::vector<double> ms = grid_values(grid.m);
    const std::vector<double> qs = grid_values(grid.q);
    const std::vector<double> bs = grid.b ? grid_values(*grid.b) : std::vector<double>{};

    std::vector<GridCell> cells;
    for (double a : as) {
        const std::vector<double> b_axis = grid.b ? bs : std::vector<double>{grid.b_factor * a};
        for (double b : b_axis) {
            for (double m : ms) {
                for (double q : qs) {
                    SolverConfig cfg = base_config;
                    cfg.a = a;
                    cfg.b = b;
                    cfg.m = m;
                    cfg.q = q;
                    const CandidateScore score =
                        score_subset(features, features.names, graph, cfg, index_kind, n_seeds);
                    GridCell cell;
                    cell.a = a;
                    cell.b = b;
                    cell.m = m;
                    cell.q = q;
                    cell.per_seed_scores = score.per_seed_scores;
                    cell.mean = score.mean;
                    cell.stddev = score.stddev;
                    cells.push_back(std::move(cell));
                }
            }
        }
    }
    std::stable_sort(cells.begin(), cells.end(),
                     [](const GridCell& x, const GridCell& y) { return x.mean < y.mean; });
    return cells;
}

/// Uniform k-subset of the pool without replacement, deterministic per seed.
/// The result keeps the pool's order.
inline std::vector<std::string> random_baseline(const std::vector<std::string>& pool, int k,
                                                std::uint64_t seed) {
    if (k < 0 || k > static_cast<int>(pool.size()))
        throw std::invalid_argument("baseline subset size out of range");
    std::vector<int> idx(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) idx[i] = static_cast<int>(i);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, static_cast<int>(pool.size()) - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> out;
    for (int i : idx) out.push_back(pool[i]);
    return out;
}

} // namespace seatex

#endif
