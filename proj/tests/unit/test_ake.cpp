#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "memeattr/ake.hpp"
#include "memeattr/errors.hpp"
#include "memeattr/mock_backend.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace memeattr;
using namespace memeattr::ake;

namespace {

/// Supports nothing: every capability throws CapabilityUnsupported.
class NullBackend final : public model::ModelBackend {
public:
    std::string name() const override { return "null"; }
};

class NanBackend final : public model::ModelBackend {
public:
    std::string name() const override { return "nan"; }
    model::BinaryLogits yes_no_logits(const std::string&) override {
        return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    }
};

const text::KnowledgeIndex& fixture_index() {
    static const text::KnowledgeIndex idx = [] {
        model::MockBackend emb;
        return text::build_knowledge_index(kb::load_kb(testkit::fixture("kb_small.jsonl")), emb, 64);
    }();
    return idx;
}

text::ScoredDoc cand(std::string id, std::optional<double> p) {
    text::ScoredDoc d;
    d.doc_id = std::move(id);
    d.p_rel = p;
    return d;
}

}  // namespace

TEST(QuerySet, TrimsDropsEmptiesAndDeduplicates) {
    const std::vector<std::string> exp{" 菜狗 ", "", "noob", "  ", "菜狗"};
    const auto qs = build_query_set("  你个菜狗 ", "a dog", exp);
    ASSERT_EQ(qs.items.size(), 4u);
    EXPECT_EQ(qs.items[0], (QueryItem{"你个菜狗", QuerySource::FromText}));
    EXPECT_EQ(qs.items[1], (QueryItem{"a dog", QuerySource::FromDescription}));
    EXPECT_EQ(qs.items[2], (QueryItem{"菜狗", QuerySource::FromExpansion}));
    EXPECT_EQ(qs.items[3], (QueryItem{"noob", QuerySource::FromExpansion}));
}

TEST(QuerySet, TextWinsOverEqualDescription) {
    const auto qs = build_query_set("same", " same ", {});
    ASSERT_EQ(qs.items.size(), 1u);
    EXPECT_EQ(qs.items[0].source, QuerySource::FromText);
}

TEST(QuerySet, AllBlankThrows) {
    const std::vector<std::string> exp{" ", ""};
    EXPECT_THROW(build_query_set(" ", "\t", exp), EmptyQuerySet);
}

TEST(Expansion, ParsesSeparatorsAndBullets) {
    EXPECT_EQ(parse_expansion("a; b；c\n- d\n2. e\n* f"), (std::vector<std::string>{"a", "b", "c", "d", "e", "f"}));
    EXPECT_EQ(parse_expansion(";;\n  \n"), std::vector<std::string>{});
    EXPECT_EQ(parse_expansion("a;b;c", 2), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(parse_expansion("1997; 3)x"), (std::vector<std::string>{"1997", "x"}));
}

TEST(Expansion, RequestMentionsMeme) {
    const auto req = expansion_request("你个菜狗", "a dog");
    EXPECT_NE(req.user.find("你个菜狗"), std::string::npos);
    EXPECT_NE(req.user.find("a dog"), std::string::npos);
    EXPECT_EQ(req.decoding.temperature, 0.0);
}

TEST(Rerank, PosteriorIsStableSigmoid) {
    EXPECT_NEAR(relevance_posterior(2.0, 0.0), 0.8807970779778823, 1e-15);
    EXPECT_NEAR(relevance_posterior(-0.1, -2.4), 0.9088770389851439, 1e-15);
    EXPECT_EQ(relevance_posterior(1e4, -1e4), 1.0);
    EXPECT_EQ(relevance_posterior(-1e4, 1e4), 0.0);
    EXPECT_EQ(relevance_posterior(3.0, 3.0), 0.5);
}

TEST(Rerank, FailedCallsScoreZero) {
    const auto& idx = fixture_index();
    std::vector<text::ScoredDoc> cs{cand("kb-002", std::nullopt), cand("kb-001", std::nullopt)};
    NullBackend null;
    auto out = rerank(cs, "summary", idx, null);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].doc_id, "kb-001");  // tie at 0 broken by id
    EXPECT_EQ(*out[0].p_rel, 0.0);
    EXPECT_EQ(*out[1].p_rel, 0.0);
    NanBackend nan;
    out = rerank(cs, "summary", idx, nan, 2);
    EXPECT_EQ(*out[0].p_rel, 0.0);
}

TEST(Rerank, ScenarioLogitsOrderResults) {
    const auto& idx = fixture_index();
    model::ScenarioTable t;
    t.add_logits("Document: " + idx.entry("kb-003").term + ":", 3.0, -3.0);
    t.add_logits("Relevant:", -3.0, 3.0);
    model::MockBackend m(std::move(t));
    std::vector<text::ScoredDoc> cs{cand("kb-001", std::nullopt), cand("kb-003", std::nullopt)};
    const auto out = rerank(cs, "x", idx, m, 2);
    EXPECT_EQ(out[0].doc_id, "kb-003");
    EXPECT_NEAR(*out[0].p_rel, testkit::sigmoid_oracle(6.0), 1e-15);
    EXPECT_NEAR(*out[1].p_rel, testkit::sigmoid_oracle(-6.0), 1e-15);
}

TEST(Gate, ThresholdInclusiveAndTruncates) {
    std::vector<text::ScoredDoc> cs{cand("a", 0.5), cand("b", 0.49), cand("c", 0.9), cand("d", std::nullopt),
                                    cand("e", 0.9), cand("f", 0.7)};
    const auto kept = gate_candidates(cs, {0.5, 3, 20});
    ASSERT_EQ(kept.size(), 3u);
    EXPECT_EQ(kept[0].doc_id, "c");
    EXPECT_EQ(kept[1].doc_id, "e");
    EXPECT_EQ(kept[2].doc_id, "f");
    EXPECT_EQ(gate_candidates(cs, {0.0, 10, 20}).size(), 6u);  // missing p_rel counts as 0
    EXPECT_TRUE(gate_candidates(cs, {0.95, 10, 20}).empty());
}

TEST(Gate, ConfigValidation) {
    EXPECT_NO_THROW((GateConfig{}.validate()));
    EXPECT_THROW((GateConfig{1.5, 5, 20}.validate()), InvalidArgument);
    EXPECT_THROW((GateConfig{0.5, 0, 20}.validate()), InvalidArgument);
    EXPECT_THROW((GateConfig{0.5, 10, 5}.validate()), InvalidArgument);
}

TEST(Gate, FragmentsCarryEntries) {
    const auto& idx = fixture_index();
    auto a = cand("kb-001", 0.8);
    a.s_hybrid = 0.7;
    const std::vector<text::ScoredDoc> cs{a};
    const auto ctx = gate(cs, {}, idx);
    ASSERT_EQ(ctx.fragments.size(), 1u);
    EXPECT_EQ(ctx.fragments[0].entry.term, "菜狗");
    EXPECT_EQ(ctx.fragments[0].p_rel, 0.8);
    EXPECT_EQ(ctx.fragments[0].s_hybrid, 0.7);
}

TEST(Retrieve, SingleQueryMatchesTopK) {
    const auto& idx = fixture_index();
    model::MockBackend emb;
    const auto qs = build_query_set("菜狗", "", {});
    const auto got = retrieve_candidates(qs, idx.bm25, idx.dense, emb, {}, 5);
    const auto vec = model::hashed_embedding("菜狗", 64);
    const auto toks = text::tokenize("菜狗");
    const auto want = text::top_k(idx.bm25, idx.dense, toks, vec, {}, 5);
    EXPECT_EQ(got, want);
    EXPECT_EQ(got[0].doc_id, "kb-001");
}

TEST(RunAke, FixtureMemeFindsItsTerm) {
    const auto& idx = fixture_index();
    model::ScenarioTable t;
    t.add_logits("Document: 菜狗:", 4.0, -4.0);
    t.add_logits("Relevant:", -4.0, 4.0);
    model::MockBackend m(std::move(t));
    NullBackend no_expansion;
    const auto ctx = run_ake(MemeInput{"又输了，你个菜狗", "a cartoon dog"}, idx, {no_expansion, m, m}, AkeConfig{});
    ASSERT_EQ(ctx.fragments.size(), 1u);
    EXPECT_EQ(ctx.fragments[0].entry.id, "kb-001");
    EXPECT_EQ(ctx.query_set.items.size(), 2u);
}

TEST(RunAke, MemeSummary) {
    EXPECT_EQ(meme_summary(" a ", " b "), "a b");
    EXPECT_EQ(meme_summary("", " b "), "b");
}
