#include <gtest/gtest.h>

#include <sstream>

#include "memeattr/dataset.hpp"
#include "memeattr/errors.hpp"
#include "support/gen.hpp"
#include "support/reference_corpus.hpp"

using namespace memeattr;
using namespace memeattr::kb;

namespace {

const std::string kGood =
    R"({"id":"x","text":"t","description":"d","label":"harmful","harm_type":"sexual","exp_harmful":"h","exp_nonharmful":"n","split":"test"})";

std::string with(const std::string& from, const std::string& to) {
    std::string s = kGood;
    s.replace(s.find(from), from.size(), to);
    return s;
}

}  // namespace

TEST(Dataset, ParsesFullRecord) {
    const auto r = parse_record(kGood, 1);
    EXPECT_EQ(r.id, "x");
    EXPECT_EQ(r.label, HarmLabel::Harmful);
    EXPECT_EQ(r.harm_type, HarmType::SexualInnuendo);
    EXPECT_EQ(r.split, Split::Test);
    EXPECT_FALSE(r.image_ref.has_value());
    EXPECT_EQ(parse_record(serialize_record(r), 1), r);
}

TEST(Dataset, HarmTypeRequiredIffHarmful) {
    try {
        parse_record(with(R"("harm_type":"sexual",)", ""), 3);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.field(), "harm_type");
    }
    try {
        parse_record(with(R"("label":"harmful")", R"("label":"non-harmful")"), 3);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.field(), "harm_type");
    }
}

TEST(Dataset, UnknownEnumValuesNameTheirField) {
    for (auto [from, to, field] : std::vector<std::tuple<std::string, std::string, std::string>>{
             {R"("label":"harmful")", R"("label":"toxic")", "label"},
             {R"("split":"test")", R"("split":"dev")", "split"},
             {R"("harm_type":"sexual")", R"("harm_type":"rude")", "harm_type"}}) {
        try {
            parse_record(with(from, to), 1);
            FAIL() << to;
        } catch (const SchemaError& e) {
            EXPECT_EQ(e.field(), field);
        }
    }
}

TEST(Dataset, TextOrDescriptionRequired) {
    const auto s = with(R"("text":"t","description":"d")", R"("text":"","description":" ")");
    EXPECT_THROW(parse_record(s, 1), SchemaError);
    EXPECT_NO_THROW(parse_record(with(R"("text":"t")", R"("text":"")"), 1));
}

TEST(Dataset, FixtureStats) {
    const auto records = load_dataset(testkit::fixture("dataset_small.jsonl"));
    ASSERT_EQ(records.size(), 12u);
    const auto s = dataset_stats(records);
    EXPECT_EQ(s.total, 12u);
    EXPECT_EQ(s.harmful, 6u);
    EXPECT_EQ(s.non_harmful, 6u);
    EXPECT_EQ(s.explanation_count, 24u);
    EXPECT_EQ(s.per_harm_type.at("targeted"), 3u);
    EXPECT_EQ(s.per_split.at("train") + s.per_split.at("test"), 12u);
}

TEST(Dataset, ExplanationLengthMeanAndPopulationStd) {
    MemeRecord a{"a", std::nullopt, "t", "", HarmLabel::NonHarmful, std::nullopt, "ab", "abcd", Split::Train};
    MemeRecord b{"b", std::nullopt, "t", "", HarmLabel::NonHarmful, std::nullopt, "菜狗菜狗菜狗", "xy", Split::Train};
    const std::vector<MemeRecord> rs{a, b};
    const auto s = dataset_stats(rs);
    // lengths 2, 4, 6, 2: mean 3.5, population variance (2.25+0.25+6.25+2.25)/4 = 2.75
    EXPECT_DOUBLE_EQ(*s.mean_explanation_chars, 3.5);
    EXPECT_NEAR(*s.std_explanation_chars, 1.6583123951777, 1e-12);
}

TEST(Dataset, DuplicateIdsRejected) {
    std::istringstream in(kGood + "\n" + kGood + "\n");
    EXPECT_THROW(read_dataset(in), DuplicateId);
}

TEST(Dataset, ReferenceRowsAreInternallyInconsistent) {
    // The published per-type counts exceed the harmful totals in both splits.
    const auto& train = kReferenceSplitCounts[0];
    std::size_t sum = 0;
    for (auto n : train.per_type) sum += n;
    EXPECT_EQ(train.harmful, 2988u);
    EXPECT_EQ(sum, 3528u);
    EXPECT_EQ(kReferenceSplitCounts[0].harmful + kReferenceSplitCounts[1].harmful, 3735u);
}

TEST(Dataset, ReferenceWarningsNeverThrow) {
    std::stringstream buf;
    testkit::write_reference_corpus(buf);
    const auto records = read_dataset(buf);
    const auto s = dataset_stats(records);
    std::vector<std::string> warnings;
    ASSERT_NO_THROW(warnings = reference_count_warnings(s, kReferenceSplitCounts));
    ASSERT_FALSE(warnings.empty());
    EXPECT_NE(warnings[0].find("sum to 3528"), std::string::npos);
}
