#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "memeattr/errors.hpp"
#include "memeattr/eval.hpp"
#include "memeattr/mock_backend.hpp"

using namespace memeattr;
using namespace memeattr::eval;
using kb::HarmLabel;

namespace {

constexpr auto H = HarmLabel::Harmful;
constexpr auto N = HarmLabel::NonHarmful;

kb::MemeRecord rec(std::string id, HarmLabel label, std::string exp) {
    kb::MemeRecord r;
    r.id = std::move(id);
    r.text = "text";
    r.label = label;
    if (label == H) r.harm_type = kb::HarmType::Targeted;
    r.exp_harmful = std::move(exp);
    r.exp_nonharmful = "fine";
    return r;
}

DecisionRecord dec(std::string id, HarmLabel label, std::string reason,
                   rir::ParseStatus st = rir::ParseStatus::Clean) {
    DecisionRecord d;
    d.id = std::move(id);
    d.decision = {label, std::move(reason), "", st};
    return d;
}

// tp r1 r5, fn r2, fp r3, tn r4
std::vector<kb::MemeRecord> gold() {
    return {rec("r1", H, "the cat sat on mat"), rec("r2", H, "the cat sat on mat"), rec("r3", N, "x"),
            rec("r4", N, "x"), rec("r5", H, "the cat sat on mat")};
}

std::vector<DecisionRecord> preds() {
    return {dec("r1", H, "the cat sat on mat"), dec("r2", N, "the cat sat on"), dec("r3", H, "no"),
            dec("r4", N, "raw", rir::ParseStatus::Fallback), dec("r5", H, "the cat sat on rug")};
}

}  // namespace

TEST(Eval, HandFixture) {
    const auto g = gold();
    const auto p = preds();
    const auto r = evaluate_run(p, g);
    EXPECT_EQ(r.confusion.tp, 2u);
    EXPECT_EQ(r.confusion.fn, 1u);
    EXPECT_EQ(r.confusion.fp, 1u);
    EXPECT_EQ(r.confusion.tn, 1u);
    EXPECT_DOUBLE_EQ(*r.classification.accuracy, 0.6);
    EXPECT_EQ(r.fallback_count, 1u);
    EXPECT_EQ(r.generation_count, 3u);
    ASSERT_TRUE(r.generation);
    EXPECT_NEAR(r.generation->bleu4, 0.8158470293492757, 1e-12);
    EXPECT_NEAR(r.generation->rouge_l, 0.8962962962962964, 1e-12);
    EXPECT_FALSE(r.likert_means);
    EXPECT_FALSE(r.per_record[2].bleu4);  // r3 is gold non-harmful
}

TEST(Eval, IndependentOfInputOrderAndParallelism) {
    auto g = gold();
    auto p = preds();
    const auto want = report_to_json(evaluate_run(p, g, {nullptr, 1}), {}).dump();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(g.begin(), g.end(), rng);
        std::shuffle(p.begin(), p.end(), rng);
        EXPECT_EQ(report_to_json(evaluate_run(p, g, {nullptr, std::size_t(1 + i % 4)}), {}).dump(), want);
    }
}

TEST(Eval, IdSetsMustMatch) {
    const auto g = gold();
    auto p = preds();
    p.pop_back();
    EXPECT_THROW(evaluate_run(p, g), IdMismatch);
    p = preds();
    p[0].id = "zz";
    EXPECT_THROW(evaluate_run(p, g), IdMismatch);
    p = preds();
    p.push_back(p[0]);
    EXPECT_THROW(evaluate_run(p, g), IdMismatch);
}

TEST(Eval, LikertPassUsesJudge) {
    model::ScenarioTable t;
    t.add_response("SCORES", "SCORES: 4, 4.5, 3, 5, 9");
    model::MockBackend judge(std::move(t));
    const auto g = gold();
    const auto p = preds();
    const auto r = evaluate_run(p, g, {&judge, 2});
    ASSERT_TRUE(r.likert_means);
    EXPECT_EQ((*r.likert_means)[1], 4.5);
    EXPECT_EQ((*r.likert_means)[4], 5.0);
    EXPECT_EQ(r.likert_clamped, 3u);
    const auto j = report_to_json(r, {{"k", 1}});
    EXPECT_EQ(j["likert"]["rubric"], "likert-rubric-v1");
    EXPECT_EQ(j["likert"]["judge"], "mock");
    EXPECT_EQ(j["config"]["k"], 1);
}

TEST(Eval, DecisionFileRoundTrip) {
    auto d = dec("m1", H, "理由", rir::ParseStatus::Recovered);
    d.p_rels = {{"kb-001", 0.75}};
    d.config = {{"tau_rel", 0.5}};
    std::istringstream in(serialize_decision_record(d) + "\n");
    const auto back = read_decisions(in);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].decision, d.decision);
    EXPECT_EQ(back[0].p_rels, d.p_rels);
    EXPECT_EQ(back[0].config, d.config);
    std::istringstream bad(R"({"id":"a","label":"maybe","reason":"r"})" "\n");
    EXPECT_THROW(read_decisions(bad), SchemaError);
}

TEST(Eval, ReportRoundingAndTables) {
    EXPECT_EQ(report_round(0.1234564), 0.123456);
    EXPECT_FALSE(std::signbit(report_round(-1e-9)));
    const std::vector<ClassificationRow> rows{{"m", "run", prf1({2, 1, 1, 1})}};
    const auto t = render_classification_table(rows);
    EXPECT_NE(t.find("0.600"), std::string::npos);
    EXPECT_NE(t.find("0.667"), std::string::npos);
    const std::vector<GenerationRow> gen{{"run", GenerationScores{0.5, 0.25}, std::nullopt}};
    const auto g = render_generation_table(gen);
    EXPECT_NE(g.find("50.00"), std::string::npos);
    EXPECT_NE(g.find("3.14"), std::string::npos);
}
