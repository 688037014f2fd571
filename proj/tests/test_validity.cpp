#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "seatex/validity.hpp"
#include "test_util.hpp"

using namespace seatex;

namespace {

Partition crisp_partition(const Matrix& centers, const std::vector<int>& assignment) {
    Partition p;
    p.centers = centers;
    p.memberships = Matrix(centers.rows, static_cast<int>(assignment.size()));
    for (std::size_t n = 0; n < assignment.size(); ++n)
        p.memberships(assignment[n], static_cast<int>(n)) = 1.0;
    p.typicalities = Matrix(centers.rows, static_cast<int>(assignment.size()), 1.0);
    p.gammas.assign(centers.rows, 1.0);
    p.possibilistic = true;
    return p;
}

// literal double-loop XB/VXB oracle
double oracle_index(const FeatureMatrix& f, const Partition& p, bool with_typicality) {
    double num = 0.0;
    for (int i = 0; i < p.centers.rows; ++i)
        for (int j = 0; j < f.values.rows; ++j) {
            double w = p.memberships(i, j);
            if (with_typicality) w *= p.typicalities(i, j);
            double d2 = 0.0;
            for (int k = 0; k < f.values.cols; ++k) {
                const double diff = f.values(j, k) - p.centers(i, k);
                d2 += diff * diff;
            }
            num += w * w * d2;
        }
    double sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p.centers.rows; ++i)
        for (int k = 0; k < p.centers.rows; ++k) {
            if (i == k) continue;
            double d2 = 0.0;
            for (int j = 0; j < p.centers.cols; ++j) {
                const double diff = p.centers(i, j) - p.centers(k, j);
                d2 += diff * diff;
            }
            sep = std::min(sep, d2);
        }
    return num / (f.values.rows * sep);
}

Partition random_partition(int clusters, int n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0), spread(-3.0, 3.0);
    Partition p;
    p.possibilistic = true;
    p.centers = Matrix(clusters, d);
    for (auto& v : p.centers.data) v = spread(rng);
    p.memberships = Matrix(clusters, n);
    for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (int i = 0; i < clusters; ++i) {
            p.memberships(i, j) = unit(rng) + 1e-6;
            sum += p.memberships(i, j);
        }
        for (int i = 0; i < clusters; ++i) p.memberships(i, j) /= sum;
    }
    p.typicalities = Matrix(clusters, n);
    for (auto& v : p.typicalities.data) v = 1e-3 + (1.0 - 1e-3) * unit(rng);
    p.gammas.assign(clusters, 1.0);
    return p;
}

} // namespace

TEST_CASE("crisp on-center partition scores zero", "[validity]") {
    Matrix values(2, 1);
    values.data = {0.0, 2.0};
    Matrix centers(2, 1);
    centers.data = {0.0, 2.0};
    const FeatureMatrix f = testutil::make_features(values);
    const Partition p = crisp_partition(centers, {0, 1});

    const ValidityScore s = xb(f, p);
    CHECK(s.value == 0.0);
    CHECK(s.numerator == 0.0);
    CHECK(s.denominator == Catch::Approx(8.0)); // 2 * (2-0)^2
    CHECK(s.nonzero_terms == 0);
}

TEST_CASE("hand-computed XB on 1-D points {0,1,4,5}", "[validity]") {
    Matrix values(4, 1);
    values.data = {0.0, 1.0, 4.0, 5.0};
    Matrix centers(2, 1);
    centers.data = {0.5, 4.5};
    const FeatureMatrix f = testutil::make_features(values);
    const Partition p = crisp_partition(centers, {0, 0, 1, 1});

    const ValidityScore s = xb(f, p);
    CHECK(s.numerator == Catch::Approx(1.0).margin(1e-15));
    CHECK(s.denominator == Catch::Approx(64.0).margin(1e-12));
    CHECK(s.value == Catch::Approx(0.015625).margin(1e-15));
    CHECK(s.n_points == 4);
    CHECK(s.nonzero_terms == 4); // N for a crisp partition off the centers
}

TEST_CASE("uniform typicality 0.5 scales VXB by one quarter", "[validity]") {
    Matrix values(4, 1);
    values.data = {0.0, 1.0, 4.0, 5.0};
    Matrix centers(2, 1);
    centers.data = {0.5, 4.5};
    const FeatureMatrix f = testutil::make_features(values);
    Partition p = crisp_partition(centers, {0, 0, 1, 1});
    for (auto& t : p.typicalities.data) t = 0.5;

    const ValidityScore s = vxb(f, p);
    CHECK(s.value == Catch::Approx(0.00390625).margin(1e-15));
}

TEST_CASE("all-ones typicality makes VXB equal XB exactly", "[validity]") {
    const Partition p = random_partition(3, 20, 2, 7);
    Matrix values(20, 2);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> spread(-2.0, 2.0);
    for (auto& v : values.data) v = spread(rng);
    const FeatureMatrix f = testutil::make_features(values);

    Partition ones = p;
    for (auto& t : ones.typicalities.data) t = 1.0;
    CHECK(vxb(f, ones).value == xb(f, ones).value);
    CHECK(vxb(f, ones).numerator == xb(f, ones).numerator);
}

TEST_CASE("zero typicality suppresses a point entirely", "[validity]") {
    Matrix values(3, 1);
    values.data = {0.0, 1.0, 50.0}; // last point is a far outlier
    Matrix centers(2, 1);
    centers.data = {0.0, 1.0};
    const FeatureMatrix f = testutil::make_features(values);
    Partition p = crisp_partition(centers, {0, 1, 1});
    p.typicalities(1, 2) = 1e-300; // effectively zero

    const ValidityScore s = vxb(f, p);
    CHECK(std::isfinite(s.value));
    CHECK(s.numerator < 1e-12); // the distant point no longer dominates
}

TEST_CASE("xb and vxb match the literal oracle on random instances", "[validity]") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> spread(-4.0, 4.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int clusters = 2 + static_cast<int>(rng() % 4);
        const int n = clusters + static_cast<int>(rng() % 40);
        const int d = 1 + static_cast<int>(rng() % 4);
        Matrix values(n, d);
        for (auto& v : values.data) v = spread(rng);
        const FeatureMatrix f = testutil::make_features(values);
        const Partition p = random_partition(clusters, n, d, 1000 + trial);

        const double xb_expected = oracle_index(f, p, false);
        const double vxb_expected = oracle_index(f, p, true);
        CHECK(std::abs(xb(f, p).value - xb_expected) <=
              1e-12 * std::max(1.0, std::abs(xb_expected)));
        CHECK(std::abs(vxb(f, p).value - vxb_expected) <=
              1e-12 * std::max(1.0, std::abs(vxb_expected)));
    }
}

TEST_CASE("vxb never exceeds xb for typicalities in (0,1]", "[validity]") {
    for (int trial = 0; trial < 10; ++trial) {
        const Partition p = random_partition(3, 25, 3, 2000 + trial);
        Matrix values(25, 3);
        std::mt19937_64 rng(3000 + trial);
        std::uniform_real_distribution<double> spread(-2.0, 2.0);
        for (auto& v : values.data) v = spread(rng);
        const FeatureMatrix f = testutil::make_features(values);
        CHECK(vxb(f, p).value <= xb(f, p).value);
    }
}

TEST_CASE("permuting cluster indices leaves both scores unchanged", "[validity]") {
    const Partition p = random_partition(3, 15, 2, 42);
    Matrix values(15, 2);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> spread(-2.0, 2.0);
    for (auto& v : values.data) v = spread(rng);
    const FeatureMatrix f = testutil::make_features(values);

    Partition shuffled = p;
    const int perm[3] = {2, 0, 1};
    for (int c = 0; c < 3; ++c) {
        for (int j = 0; j < 2; ++j) shuffled.centers(perm[c], j) = p.centers(c, j);
        for (int n = 0; n < 15; ++n) {
            shuffled.memberships(perm[c], n) = p.memberships(c, n);
            shuffled.typicalities(perm[c], n) = p.typicalities(c, n);
        }
    }
    CHECK(xb(f, shuffled).value == Catch::Approx(xb(f, p).value).epsilon(1e-12));
    CHECK(vxb(f, shuffled).value == Catch::Approx(vxb(f, p).value).epsilon(1e-12));
}

TEST_CASE("fuzzy partitions count N*C nonzero terms", "[validity]") {
    const Partition p = random_partition(3, 10, 2, 77);
    Matrix values(10, 2);
    std::mt19937_64 rng(78);
    std::uniform_real_distribution<double> spread(1.0, 2.0);
    for (auto& v : values.data) v = spread(rng); // away from the random centers
    const FeatureMatrix f = testutil::make_features(values);
    CHECK(xb(f, p).nonzero_terms == 30);
}

TEST_CASE("degenerate partitions are rejected", "[validity]") {
    Matrix values(4, 1);
    values.data = {0.0, 1.0, 2.0, 3.0};
    const FeatureMatrix f = testutil::make_features(values);

    Matrix coincident(2, 1);
    coincident.data = {1.0, 1.0};
    const Partition p = crisp_partition(coincident, {0, 0, 1, 1});
    CHECK_THROWS_AS(xb(f, p), DegenerateClusteringError);

    Matrix single(1, 1);
    single.data = {1.0};
    CHECK_THROWS(xb(f, crisp_partition(single, {0, 0, 0, 0})));

    Matrix ok(2, 1);
    ok.data = {0.5, 2.5};
    Partition crisp = crisp_partition(ok, {0, 0, 1, 1});
    crisp.possibilistic = false; // kmeans/flicm placeholder typicality
    CHECK_THROWS(vxb(f, crisp));
}
