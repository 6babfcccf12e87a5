#include "adl/error.hpp"
#include "adl/json_io.hpp"
#include "adl/rng.hpp"
#include "adl/shatter.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace adl;

TEST(Shatter, SampleCount) {
    EXPECT_EQ(shatter_sample_count(20), 2u);
    EXPECT_EQ(shatter_sample_count(10), 1u);
    EXPECT_EQ(shatter_sample_count(5), 1u);
    EXPECT_EQ(shatter_sample_count(209), 20u);
}

TEST(Shatter, CandidateShapes) {
    Rng rng = make_stream(90, 0);
    ShatterCandidate c = sample_candidate(20, 20, rng);
    EXPECT_EQ(c.m, 2u);
    ASSERT_EQ(c.A.size(), 4u);
    for (const auto& A : c.A) {
        EXPECT_EQ(A.rows(), 20);
        EXPECT_EQ(A.cols(), 20);
    }
    EXPECT_EQ(c.x.rows(), 2);
    for (Eigen::Index i = 0; i < c.x.rows(); ++i)
        for (Eigen::Index j = 0; j < c.x.cols(); ++j) EXPECT_DOUBLE_EQ(std::abs(c.x(i, j)), 1.0 / std::sqrt(20.0));
    EXPECT_THROW(sample_candidate(10, 5, rng), DomainError);
}

TEST(Shatter, RefusesOversizedInstances) {
    Rng rng = make_stream(91, 0);
    EXPECT_THROW(sample_candidate(5, 300, rng), RefusalError);
}

TEST(Shatter, CandidateIsDeterministic) {
    Rng a = make_stream(92, 3), b = make_stream(92, 3);
    ShatterCandidate x = sample_candidate(12, 24, a), y = sample_candidate(12, 24, b);
    EXPECT_EQ(x.x, y.x);
    for (std::size_t s = 0; s < x.A.size(); ++s) EXPECT_EQ(x.A[s], y.A[s]);
}

TEST(Separation, DuplicateMatricesFail) {
    Rng rng = make_stream(93, 0);
    ShatterCandidate c = sample_candidate(20, 20, rng);
    c.A[1] = c.A[0];
    SeparationReport r = check_separation(c);
    EXPECT_FALSE(r.cross_ok);
    EXPECT_EQ(r.min_cross_dist_sq, 0.0);
    EXPECT_FALSE(r.pass());
}

TEST(Separation, LargeMatricesFailNormCheck) {
    Rng rng = make_stream(94, 0);
    ShatterCandidate c = sample_candidate(20, 20, rng);
    for (auto& A : c.A) A *= 3.0;
    SeparationReport r = check_separation(c);
    EXPECT_FALSE(r.frobenius_ok);
    EXPECT_GT(r.max_frobenius_sq, 40.0);
}

TEST(Extension, OneDimensional) {
    Matrix nodes(2, 1);
    nodes << 0.0, 1.0;
    LipschitzExtension e = make_extension(nodes, {1.0, -1.0});
    EXPECT_EQ(e.center, 0.0);
    EXPECT_EQ(e.alpha, 1.0);
    EXPECT_EQ(e.lipschitz(), 2.0);
    auto at = [&](double u) { return eval_extension(e, std::vector<double>{u}); };
    EXPECT_DOUBLE_EQ(at(0.0), 1.0);
    EXPECT_DOUBLE_EQ(at(1.0), -1.0);
    EXPECT_DOUBLE_EQ(at(0.5), 0.0);
    EXPECT_DOUBLE_EQ(at(10.0), -19.0);
}

TEST(Extension, InterpolatesAndIsLipschitz) {
    Rng rng = make_stream(95, 0);
    Matrix nodes(6, 3);
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < 3; ++j) nodes(i, j) = gaussian(rng);
    std::vector<double> labels{1, -1, 3, 0.5, -2, 1};
    LipschitzExtension e = make_extension(nodes, labels);
    for (std::size_t k = 0; k < 6; ++k)
        EXPECT_NEAR(eval_extension(e, row_span(nodes, k)), labels[k], 1e-12);
    for (int t = 0; t < 2000; ++t) {
        std::vector<double> a(3), b(3);
        double dist = 0.0;
        for (int j = 0; j < 3; ++j) {
            a[j] = 2 * gaussian(rng);
            b[j] = a[j] + 0.3 * gaussian(rng);
            dist += (a[j] - b[j]) * (a[j] - b[j]);
        }
        EXPECT_LE(std::abs(eval_extension(e, a) - eval_extension(e, b)),
                  e.lipschitz() * std::sqrt(dist) + 1e-12);
    }
}

TEST(Instance, SingleSample) {
    ShatterInstance inst = build_instance(10, 10, 5);
    EXPECT_EQ(inst.candidate.m, 1u);
    EXPECT_EQ(inst.patterns(), 2u);
    EXPECT_EQ(inst.extension.center, 0.0);
    ShatterReport r = verify_shatter(inst);
    EXPECT_TRUE(r.pass());
    EXPECT_EQ(r.cells, 2u);
}

TEST(Instance, MarginsAreExactlyOne) {
    ShatterInstance inst = build_instance(20, 20, 7);
    EXPECT_TRUE(inst.separation.pass());
    EXPECT_GE(inst.attempts, 1u);
    ShatterReport r = verify_shatter(inst);
    EXPECT_TRUE(r.pass());
    EXPECT_EQ(r.cells, 8u);
    EXPECT_NEAR(r.min_margin, 1.0, 1e-12);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t i = 0; i < 2; ++i) {
            double expect = ((k >> i) & 1u) ? 1.0 : -1.0;
            EXPECT_EQ(inst.label(k, i), expect);
        }
}

TEST(Instance, CorruptedLabelFailsOneCell) {
    ShatterInstance inst = build_instance(20, 20, 7);
    // Node 3·m + 1 is pattern k = 3, sample i = 1.
    std::size_t node = 3 * inst.candidate.m + 1;
    inst.extension.labels[node] = -inst.extension.labels[node];
    inst.extension = make_extension(inst.extension.nodes, inst.extension.labels);
    ShatterReport r = verify_shatter(inst);
    ASSERT_EQ(r.failures.size(), 1u);
    EXPECT_EQ(r.failures[0].k, 3u);
    EXPECT_EQ(r.failures[0].i, 1u);
}

TEST(Instance, LipschitzAudit) {
    ShatterInstance inst = build_instance(20, 20, 7);
    Rng rng = make_stream(96, 0);
    LipschitzReport r = verify_lipschitz(inst, 10000, rng);
    EXPECT_TRUE(r.pass());
    EXPECT_GT(r.pairs, 10000u);
    EXPECT_LE(r.lipschitz, 8.0);
    // The steepest node pair attains the constant within rounding.
    EXPECT_GT(r.max_ratio, 0.0);
    EXPECT_LE(r.max_ratio, r.lipschitz + 1e-9);
}

TEST(Instance, SearchFailureCarriesBestReport) {
    // d = 1 leaves two distinct points for m = 4 samples.
    try {
        build_instance(1, 40, 3, 5);
        FAIL() << "expected ShatterSearchError";
    } catch (const ShatterSearchError& e) {
        EXPECT_FALSE(e.best().pass());
    }
}

TEST(Instance, BundleRoundTrip) {
    ShatterInstance inst = build_instance(20, 20, 11);
    Json j = shatter_bundle(inst);
    ShatterInstance back = shatter_from_bundle(Json::parse(dump_json(j)));
    EXPECT_EQ(back.seed, inst.seed);
    EXPECT_EQ(back.candidate.x, inst.candidate.x);
    ASSERT_EQ(back.candidate.A.size(), inst.candidate.A.size());
    for (std::size_t s = 0; s < back.candidate.A.size(); ++s) EXPECT_EQ(back.candidate.A[s], inst.candidate.A[s]);
    EXPECT_TRUE(verify_shatter(back).pass());
    EXPECT_EQ(dump_json(shatter_bundle(back)), dump_json(j));
}
