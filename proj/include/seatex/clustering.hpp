#ifndef SEATEX_CLUSTERING_HPP
#define SEATEX_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatex/features.hpp"
#include "seatex/matrix.hpp"
#include "seatex/superpixel.hpp"

namespace seatex {

enum class Algorithm { kmeans, flicm, pfcm, pflicm };

inline bool is_possibilistic(Algorithm a) {
    return a == Algorithm::pfcm || a == Algorithm::pflicm;
}
inline bool uses_spatial_term(Algorithm a) {
    return a == Algorithm::flicm || a == Algorithm::pflicm;
}

inline std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::kmeans: return "kmeans";
        case Algorithm::flicm: return "flicm";
        case Algorithm::pfcm: return "pfcm";
        case Algorithm::pflicm: return "pflicm";
    }
    return "?";
}

inline Algorithm algorithm_from_name(const std::string& name) {
    if (name == "kmeans") return Algorithm::kmeans;
    if (name == "flicm") return Algorithm::flicm;
    if (name == "pfcm") return Algorithm::pfcm;
    if (name == "pflicm") return Algorithm::pflicm;
    throw std::invalid_argument("unknown algorithm: " + name);
}

struct SolverConfig {
    Algorithm algorithm = Algorithm::pflicm;
    int clusters = 3;
    double a = 14.0;       // membership weight
    double b = 1.4;        // typicality weight
    double m = 1.8;        // membership fuzzifier (> 1)
    double q = 2.8;        // typicality fuzzifier (> 1)
    double epsilon = 1e-6; // convergence threshold on max change in u (and t)
    int max_iters = 100;
    std::uint64_t seed = 0;
};

/// Full clustering state. For kmeans U is 0/1; for kmeans and flicm T stays
/// all-ones (typicality undefined reads as the identity).
struct Partition {
    Matrix centers;      // C x d
    Matrix memberships;  // C x N, columns sum to 1
    Matrix typicalities; // C x N, values in (0,1]
    std::vector<double> gammas;
    int iterations_run = 0;
    bool converged = false;
    bool possibilistic = false;
};

inline double squared_distance(std::span<const double> x, std::span<const double> c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - c[i];
        acc += d * d;
    }
    return acc;
}

/// Uniform draws, column-normalized so each point's memberships sum to 1.
inline Matrix initial_memberships(int clusters, int n_points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Matrix u(clusters, n_points);
    for (int n = 0; n < n_points; ++n) {
        double sum = 0.0;
        for (int c = 0; c < clusters; ++c) {
            u(c, n) = uniform(rng);
            sum += u(c, n);
        }
        for (int c = 0; c < clusters; ++c) u(c, n) = sum > 0.0 ? u(c, n) / sum : 1.0 / clusters;
    }
    return u;
}

/// Membership-weighted mean of the feature vectors.
inline Matrix initial_centers(const FeatureMatrix& features, const Matrix& u) {
    const int d = features.values.cols;
    Matrix centers(u.rows, d);
    for (int c = 0; c < u.rows; ++c) {
        double wsum = 0.0;
        for (int n = 0; n < u.cols; ++n) {
            const double w = u(c, n);
            wsum += w;
            for (int j = 0; j < d; ++j) centers(c, j) += w * features.values(n, j);
        }
        if (wsum > 0.0)
            for (int j = 0; j < d; ++j) centers(c, j) /= wsum;
    }
    return centers;
}

/// Spatial fuzzy factor: sum over the neighbors k of superpixel n of
/// (1/(d_nk+1)) * (1-u_ck)^m * ||x_k - c_c||^2, with memberships taken from
/// the previous iteration.
inline double g_factor(const FeatureMatrix& features, const SuperpixelMap& graph,
                       const Matrix& memberships_prev, const Matrix& centers, int c, int n,
                       double m) {
    double acc = 0.0;
    for (int k : graph.adjacency[n]) {
        const double dy = graph.centroids[n][0] - graph.centroids[k][0];
        const double dx = graph.centroids[n][1] - graph.centroids[k][1];
        const double dist = std::sqrt(dy * dy + dx * dx);
        const double d2 = squared_distance(features.values.row(k), centers.row(c));
        acc += 1.0 / (dist + 1.0) * std::pow(1.0 - memberships_prev(c, k), m) * d2;
    }
    return acc;
}

/// Membership update with the 1/(m-1) exponent restored on the distance
/// ratio: u_cn = 1 / sum_k ((alpha_cn/alpha_kn)^(1/(m-1))). With m = 2 the
/// exponent is skipped, so the plain printed ratio form is computed verbatim.
/// alpha holds d^2 (+ G where applicable); zero alphas split the membership.
inline void update_memberships(const Matrix& alpha, double m, Matrix& u) {
    const double e = 1.0 / (m - 1.0);
    for (int n = 0; n < alpha.cols; ++n) {
        int zeros = 0;
        for (int c = 0; c < alpha.rows; ++c) zeros += alpha(c, n) == 0.0;
        if (zeros > 0) {
            for (int c = 0; c < alpha.rows; ++c)
                u(c, n) = alpha(c, n) == 0.0 ? 1.0 / zeros : 0.0;
            continue;
        }
        for (int c = 0; c < alpha.rows; ++c) {
            double denom = 0.0;
            for (int k = 0; k < alpha.rows; ++k) {
                const double ratio = alpha(c, n) / alpha(k, n);
                denom += e == 1.0 ? ratio : std::pow(ratio, e);
            }
            u(c, n) = 1.0 / denom;
        }
    }
}

/// Typicality from the squared distance: 1 / (1 + ((b/gamma)*d2)^(1/(q-1))).
/// gamma = 0 takes the limit convention: 1 when d2 = 0, else 0.
inline double update_typicality(double d2, double gamma_c, double b, double q) {
    if (gamma_c <= 0.0) return d2 == 0.0 ? 1.0 : 0.0;
    const double z = std::pow(b / gamma_c * d2, 1.0 / (q - 1.0));
    double t = 1.0 / (1.0 + z);
    if (t <= 0.0) t = std::numeric_limits<double>::min(); // keep typicality positive
    return t;
}

/// Membership-weighted mean squared distance per cluster, floored at 1e-12.
inline std::vector<double> estimate_gammas(const Matrix& u, const Matrix& d2, double m) {
    std::vector<double> gammas(u.rows, 0.0);
    for (int c = 0; c < u.rows; ++c) {
        double num = 0.0, den = 0.0;
        for (int n = 0; n < u.cols; ++n) {
            const double w = std::pow(u(c, n), m);
            num += w * d2(c, n);
            den += w;
        }
        gammas[c] = std::max(den > 0.0 ? num / den : 0.0, 1e-12);
    }
    return gammas;
}

namespace detail {

inline void check_finite(const Matrix& m, const char* what) {
    for (double v : m.data)
        if (!std::isfinite(v))
            throw std::runtime_error(std::string("non-finite ") + what + " during clustering");
}

// Squared distances from every center to every point.
inline void point_distances(const FeatureMatrix& f, const Matrix& centers, Matrix& d2) {
    for (int c = 0; c < centers.rows; ++c)
        for (int n = 0; n < f.values.rows; ++n)
            d2(c, n) = squared_distance(f.values.row(n), centers.row(c));
}

// Weighted-mean center update; weights chosen per algorithm.
inline void update_centers(const FeatureMatrix& f, const SolverConfig& cfg, const Matrix& u,
                           const Matrix& t, Matrix& centers) {
    const int d = f.values.cols;
    for (int c = 0; c < centers.rows; ++c) {
        double wsum = 0.0;
        std::vector<double> acc(d, 0.0);
        for (int n = 0; n < u.cols; ++n) {
            double w = 0.0;
            switch (cfg.algorithm) {
                case Algorithm::kmeans: w = u(c, n); break;
                case Algorithm::flicm: w = std::pow(u(c, n), cfg.m); break;
                case Algorithm::pfcm:
                case Algorithm::pflicm:
                    w = cfg.a * std::pow(u(c, n), cfg.m) + cfg.b * std::pow(t(c, n), cfg.q);
                    break;
            }
            wsum += w;
            for (int j = 0; j < d; ++j) acc[j] += w * f.values(n, j);
        }
        if (wsum > 0.0)
            for (int j = 0; j < d; ++j) centers(c, j) = acc[j] / wsum;
    }
}

// Reseeds empty k-means clusters to the point farthest from its nearest center.
inline void reseed_empty_kmeans(const FeatureMatrix& f, const Matrix& u, Matrix& centers) {
    for (int c = 0; c < centers.rows; ++c) {
        double members = 0.0;
        for (int n = 0; n < u.cols; ++n) members += u(c, n);
        if (members > 0.0) continue;
        int farthest = 0;
        double best = -1.0;
        for (int n = 0; n < u.cols; ++n) {
            double nearest = std::numeric_limits<double>::infinity();
            for (int k = 0; k < centers.rows; ++k)
                nearest = std::min(nearest, squared_distance(f.values.row(n), centers.row(k)));
            if (nearest > best) {
                best = nearest;
                farthest = n;
            }
        }
        for (int j = 0; j < f.values.cols; ++j) centers(c, j) = f.values(farthest, j);
    }
}

inline void crisp_assign(const Matrix& d2, Matrix& u) {
    for (int n = 0; n < d2.cols; ++n) {
        int best = 0;
        for (int c = 1; c < d2.rows; ++c)
            if (d2(c, n) < d2(best, n)) best = c;
        for (int c = 0; c < d2.rows; ++c) u(c, n) = c == best ? 1.0 : 0.0;
    }
}

} // namespace detail

/// Alternating-optimization fit shared by all four algorithms. Per iteration:
/// centers, then memberships (G evaluated from the previous iteration's
/// memberships), then typicalities, with gamma estimated from the first
/// sweep's partition and held fixed after that. Stops when the max change in
/// u (and t where defined) drops below epsilon. If `history` is given it
/// receives the initial state and a snapshot after every iteration.
inline Partition fit(const FeatureMatrix& features, const SuperpixelMap* graph,
                     const SolverConfig& cfg, std::vector<Partition>* history = nullptr) {
    const int n_points = features.values.rows;
    if (cfg.clusters < 1) throw std::invalid_argument("clusters must be >= 1");
    if (cfg.clusters > n_points) throw std::invalid_argument("more clusters than points");
    if (!(cfg.m > 1.0) || !(cfg.q > 1.0)) throw std::invalid_argument("fuzzifiers must exceed 1");
    if (!(cfg.a > 0.0) || cfg.b < 0.0) throw std::invalid_argument("invalid a/b weights");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (uses_spatial_term(cfg.algorithm)) {
        if (!graph) throw std::invalid_argument("flicm/pflicm require a superpixel graph");
        if (graph->count != n_points)
            throw std::invalid_argument("graph size does not match feature rows");
    }

    Partition p;
    p.possibilistic = is_possibilistic(cfg.algorithm);
    p.memberships = initial_memberships(cfg.clusters, n_points, cfg.seed);
    if (cfg.algorithm == Algorithm::kmeans) {
        // crisp state from the start: assign each point to its max membership
        Matrix init = p.memberships;
        for (int n = 0; n < n_points; ++n) {
            int best = 0;
            for (int c = 1; c < cfg.clusters; ++c)
                if (init(c, n) > init(best, n)) best = c;
            for (int c = 0; c < cfg.clusters; ++c) p.memberships(c, n) = c == best ? 1.0 : 0.0;
        }
    }
    p.typicalities = Matrix(cfg.clusters, n_points, 1.0);
    p.gammas.assign(cfg.clusters, 0.0);
    p.centers = initial_centers(features, p.memberships);

    if (history) history->push_back(p);

    Matrix d2(cfg.clusters, n_points);
    Matrix alpha(cfg.clusters, n_points);
    Matrix u_prev = p.memberships;
    Matrix t_prev = p.typicalities;

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        u_prev = p.memberships;
        t_prev = p.typicalities;

        detail::update_centers(features, cfg, p.memberships, p.typicalities, p.centers);
        if (cfg.algorithm == Algorithm::kmeans)
            detail::reseed_empty_kmeans(features, p.memberships, p.centers);
        detail::point_distances(features, p.centers, d2);

        if (cfg.algorithm == Algorithm::kmeans) {
            detail::crisp_assign(d2, p.memberships);
        } else {
            if (uses_spatial_term(cfg.algorithm)) {
                for (int c = 0; c < cfg.clusters; ++c)
                    for (int n = 0; n < n_points; ++n)
                        alpha(c, n) = d2(c, n) +
                                      g_factor(features, *graph, u_prev, p.centers, c, n, cfg.m);
            } else {
                alpha = d2;
            }
            update_memberships(alpha, cfg.m, p.memberships);
        }

        if (p.possibilistic) {
            // gamma is estimated once, from the first sweep's partition, and
            // held fixed: refreshing it every iteration changes the objective
            // mid-run and forfeits the descent property of the updates
            if (iter == 1) p.gammas = estimate_gammas(p.memberships, d2, cfg.m);
            for (int c = 0; c < cfg.clusters; ++c)
                for (int n = 0; n < n_points; ++n)
                    p.typicalities(c, n) = update_typicality(d2(c, n), p.gammas[c], cfg.b, cfg.q);
        }

        detail::check_finite(p.centers, "center");
        detail::check_finite(p.memberships, "membership");
        detail::check_finite(p.typicalities, "typicality");

        double delta = 0.0;
        for (std::size_t i = 0; i < p.memberships.data.size(); ++i)
            delta = std::max(delta, std::abs(p.memberships.data[i] - u_prev.data[i]));
        if (p.possibilistic)
            for (std::size_t i = 0; i < p.typicalities.data.size(); ++i)
                delta = std::max(delta, std::abs(p.typicalities.data[i] - t_prev.data[i]));

        p.iterations_run = iter;
        if (history) history->push_back(p);
        if (delta < cfg.epsilon) {
            p.converged = true;
            if (history) history->back().converged = true;
            break;
        }
    }
    return p;
}

/// Objective value of the partition under the given algorithm:
///   kmeans  -> within-cluster sum of squares,
///   flicm   -> sum u^m (d^2 + G),
///   pfcm    -> a u^m d^2 + b t^q d^2 + gamma (1-t)^q terms,
///   pflicm  -> the full form with G inside the membership term.
inline double objective(const FeatureMatrix& features, const SuperpixelMap* graph,
                        const Partition& p, const SolverConfig& cfg) {
    const int n_points = features.values.rows;
    const int clusters = p.centers.rows;
    Matrix d2(clusters, n_points);
    detail::point_distances(features, p.centers, d2);

    double j = 0.0;
    for (int c = 0; c < clusters; ++c) {
        for (int n = 0; n < n_points; ++n) {
            switch (cfg.algorithm) {
                case Algorithm::kmeans:
                    j += p.memberships(c, n) * d2(c, n);
                    break;
                case Algorithm::flicm: {
                    const double g = graph ? g_factor(features, *graph, p.memberships, p.centers,
                                                      c, n, cfg.m)
                                           : 0.0;
                    j += std::pow(p.memberships(c, n), cfg.m) * (d2(c, n) + g);
                    break;
                }
                case Algorithm::pfcm:
                    j += cfg.a * std::pow(p.memberships(c, n), cfg.m) * d2(c, n) +
                         cfg.b * std::pow(p.typicalities(c, n), cfg.q) * d2(c, n);
                    break;
                case Algorithm::pflicm: {
                    const double g = graph ? g_factor(features, *graph, p.memberships, p.centers,
                                                      c, n, cfg.m)
                                           : 0.0;
                    j += cfg.a * std::pow(p.memberships(c, n), cfg.m) * (d2(c, n) + g) +
                         cfg.b * std::pow(p.typicalities(c, n), cfg.q) * d2(c, n);
                    break;
                }
            }
        }
        if (is_possibilistic(cfg.algorithm)) {
            double penalty = 0.0;
            for (int n = 0; n < n_points; ++n)
                penalty += std::pow(1.0 - p.typicalities(c, n), cfg.q);
            j += (c < static_cast<int>(p.gammas.size()) ? p.gammas[c] : 0.0) * penalty;
        }
    }
    return j;
}

} // namespace seatex

#endif
