#ifndef SEATEX_VALIDITY_HPP
#define SEATEX_VALIDITY_HPP

#include <limits>
#include <stdexcept>
#include <string>

#include "seatex/clustering.hpp"
#include "seatex/features.hpp"

namespace seatex {

enum class IndexKind { xb, vxb };

inline std::string index_name(IndexKind k) { return k == IndexKind::xb ? "xb" : "vxb"; }

inline IndexKind index_from_name(const std::string& name) {
    if (name == "xb") return IndexKind::xb;
    if (name == "vxb") return IndexKind::vxb;
    throw std::invalid_argument("unknown validity index: " + name);
}

/// Raised when a partition cannot be scored (coincident centers).
struct DegenerateClusteringError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Validity index with its compactness/separation decomposition.
struct ValidityScore {
    IndexKind index_kind = IndexKind::xb;
    double value = 0.0;
    double numerator = 0.0;   // compactness
    double denominator = 0.0; // N * min squared center separation
    int n_points = 0;
    int nonzero_terms = 0; // strictly positive numerator terms
};

namespace detail {

inline double min_center_separation(const Matrix& centers) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < centers.rows; ++i)
        for (int k = i + 1; k < centers.rows; ++k)
            best = std::min(best, squared_distance(centers.row(i), centers.row(k)));
    return best;
}

inline ValidityScore index_impl(const FeatureMatrix& features, const Partition& p,
                                IndexKind kind) {
    const int clusters = p.centers.rows;
    const int n = features.values.rows;
    if (clusters < 2) throw std::invalid_argument("validity index requires at least 2 clusters");

    ValidityScore s;
    s.index_kind = kind;
    s.n_points = n;
    for (int i = 0; i < clusters; ++i) {
        for (int j = 0; j < n; ++j) {
            double w = p.memberships(i, j);
            if (kind == IndexKind::vxb) w *= p.typicalities(i, j);
            const double term =
                w * w * squared_distance(features.values.row(j), p.centers.row(i));
            s.numerator += term;
            s.nonzero_terms += term > 0.0;
        }
    }
    const double sep = min_center_separation(p.centers);
    s.denominator = n * sep;
    if (!(s.denominator > 0.0))
        throw DegenerateClusteringError("coincident cluster centers: separation is zero");
    s.value = s.numerator / s.denominator;
    return s;
}

} // namespace detail

/// Xie-Beni index: compactness sum u^2 d^2 over N times the minimal squared
/// center separation. Lower is better.
inline ValidityScore xb(const FeatureMatrix& features, const Partition& partition) {
    return detail::index_impl(features, partition, IndexKind::xb);
}

/// XB variant weighting each term by (u*t)^2; defined only for partitions
/// from possibilistic algorithms.
inline ValidityScore vxb(const FeatureMatrix& features, const Partition& partition) {
    if (!partition.possibilistic)
        throw std::invalid_argument("vxb requires a possibilistic partition (pfcm/pflicm)");
    return detail::index_impl(features, partition, IndexKind::vxb);
}

inline ValidityScore compute_index(IndexKind kind, const FeatureMatrix& features,
                                   const Partition& partition) {
    return kind == IndexKind::xb ? xb(features, partition) : vxb(features, partition);
}

} // namespace seatex

#endif
