#include <gtest/gtest.h>

#include <cmath>

#include "memeattr/errors.hpp"
#include "memeattr/hybrid.hpp"
#include "memeattr/mock_backend.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace memeattr;
using namespace memeattr::text;

TEST(Dense, Cosine) {
    const std::vector<double> a{1, 0}, b{0, 1}, c{2, 0}, d{-1, 0};
    EXPECT_DOUBLE_EQ(cosine(a, b), 0.0);
    EXPECT_DOUBLE_EQ(cosine(a, c), 1.0);
    EXPECT_DOUBLE_EQ(cosine(a, d), -1.0);
    const std::vector<double> z{0, 0}, three{1, 2, 3};
    EXPECT_THROW(cosine(a, z), ZeroVector);
    EXPECT_THROW(cosine(a, three), DimensionMismatch);
}

TEST(Dense, IndexRejectsBadVectors) {
    DenseIndex idx(3);
    idx.add("a", {1, 0, 0});
    EXPECT_THROW(idx.add("b", {1, 0}), DimensionMismatch);
    EXPECT_THROW(idx.add("c", {0, 0, 0}), ZeroVector);
    EXPECT_THROW(idx.add("a", {0, 1, 0}), DuplicateId);
    EXPECT_THROW(idx.vector_for("zz"), UnknownDoc);
    EXPECT_EQ(idx.size(), 1u);
    const std::vector<double> q{1, 1, 0};
    EXPECT_NEAR(idx.similarity_all(q)[0], 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Hybrid, NormalizeScores) {
    const std::vector<double> xs{2, 4, 6};
    EXPECT_EQ(normalize_scores(xs), (std::vector<double>{0.0, 0.5, 1.0}));
    const std::vector<double> pos{3, 3}, zero{0, 0}, neg{-1, -1};
    EXPECT_EQ(normalize_scores(pos), (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(normalize_scores(zero), (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(normalize_scores(neg), (std::vector<double>{0.0, 0.0}));
    EXPECT_TRUE(normalize_scores(std::vector<double>{}).empty());
}

TEST(Hybrid, WeightsValidated) {
    EXPECT_NO_THROW((HybridWeights{1.0, 0.0}.validate()));
    EXPECT_THROW((HybridWeights{0.6, 0.6}.validate()), InvalidWeights);
    EXPECT_THROW((HybridWeights{-0.1, 1.1}.validate()), InvalidWeights);
    EXPECT_THROW((HybridWeights{NAN, 1.0}.validate()), InvalidWeights);
    EXPECT_DOUBLE_EQ(hybrid_score(1.0, 0.5, {0.3, 0.7}), 0.65);
}

TEST(Hybrid, TiesBreakById) {
    const std::vector<std::string> ids{"c", "a", "b"};
    const std::vector<double> s{1, 1, 1}, d{0.5, 0.5, 0.5};
    const auto out = fuse_and_rank(ids, s, d, {}, 3);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].doc_id, "a");
    EXPECT_EQ(out[1].doc_id, "b");
    EXPECT_EQ(out[2].doc_id, "c");
    EXPECT_EQ(fuse_and_rank(ids, s, d, {}, 1).size(), 1u);
    EXPECT_EQ(fuse_and_rank(ids, s, d, {}, 10).size(), 3u);
}

TEST(Hybrid, PureWeightsFollowOneFamily) {
    const std::vector<std::string> ids{"a", "b", "c"};
    const std::vector<double> lex{3, 2, 1}, den{0.1, 0.2, 0.9};
    EXPECT_EQ(fuse_and_rank(ids, lex, den, {1.0, 0.0}, 1)[0].doc_id, "a");
    EXPECT_EQ(fuse_and_rank(ids, lex, den, {0.0, 1.0}, 1)[0].doc_id, "c");
}

TEST(Hybrid, TopKMatchesOracle) {
    testkit::Gen gen(0xF0F0);
    model::MockBackend emb;
    for (int c = 0; c < 40; ++c) {
        std::vector<Document> docs;
        std::vector<std::string> ids;
        DenseIndex dense(32);
        const auto n = gen.size(1, 25);
        for (std::size_t i = 0; i < n; ++i) {
            docs.push_back({"d" + std::to_string(i), gen.mixed_text(6, 1)});
            ids.push_back(docs.back().id);
            dense.add(docs.back().id, model::hashed_embedding(docs.back().text, 32));
        }
        const auto bm = Bm25Index::build(docs);
        const auto qtext = gen.mixed_text(3, 1);
        const auto qv = model::hashed_embedding(qtext, 32);
        const auto q = tokenize(qtext);
        const double w = gen.real(0, 1);
        const HybridWeights weights{w, 1.0 - w};
        const auto k = gen.size(1, 10);
        const auto got = top_k(bm, dense, q, qv, weights, k);
        const auto want = testkit::fuse_oracle(ids, bm.score_all(q), dense.similarity_all(qv), weights.w_bm25,
                                               weights.w_dense, k);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].doc_id, want[i].id) << "case " << c;
            EXPECT_NEAR(got[i].s_hybrid, want[i].s_hybrid, 1e-12);
            EXPECT_FALSE(got[i].p_rel.has_value());
        }
    }
}

TEST(Hybrid, MismatchedIndexesRejected) {
    std::vector<Document> docs{{"a", "x"}, {"b", "y"}};
    const auto bm = Bm25Index::build(docs);
    DenseIndex dense(4);
    dense.add("a", {1, 0, 0, 0});
    EXPECT_THROW(check_same_documents(bm, dense), IndexMismatch);
}
