#include <gtest/gtest.h>

#include <sstream>

#include "memeattr/errors.hpp"
#include "memeattr/kb.hpp"
#include "support/gen.hpp"

using namespace memeattr;
using namespace memeattr::kb;

namespace {

KnowledgeBase read(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    std::istringstream in(text);
    return read_kb(in, warnings);
}

}  // namespace

TEST(Category, CanonicalAndAliasNames) {
    EXPECT_EQ(category_from_string("sexism"), Category::Sexism);
    EXPECT_EQ(category_from_string("LGBTQ"), Category::Lgbtq);
    EXPECT_EQ(category_from_string("Region"), Category::Region);
    EXPECT_FALSE(category_from_string("Politics").has_value());
    EXPECT_EQ(to_string(Category::Lgbtq), "LGBTQ");
}

TEST(KbEntry, UnknownCategoryFoldsIntoOthers) {
    KbEntry e;
    assign_category(e, "Politics", "");
    EXPECT_EQ(e.category, Category::Others);
    EXPECT_EQ(e.subcategory, "Politics");
    assign_category(e, "Politics", "elections");
    EXPECT_EQ(e.subcategory, "Politics/elections");
    assign_category(e, "Racism", "nationality");
    EXPECT_EQ(e.category, Category::Racism);
    EXPECT_EQ(e.subcategory, "nationality");
}

TEST(KbEntry, ValidateReportsBlankFields) {
    KbEntry e{"x", "  ", Category::Others, "", "", {"", "ok"}, ""};
    const auto problems = validate_entry(e);
    EXPECT_NE(std::find(problems.begin(), problems.end(), "term: empty"), problems.end());
    EXPECT_NE(std::find(problems.begin(), problems.end(), "definition: empty"), problems.end());
}

TEST(KbLoader, LoadsFixtureInOrder) {
    const auto kb = load_kb(testkit::fixture("kb_small.jsonl"));
    ASSERT_EQ(kb.size(), 20u);
    EXPECT_EQ(kb.entries().front().id, "kb-001");
    EXPECT_EQ(kb.entries().front().term, "菜狗");
    EXPECT_EQ(kb.entries().back().id, "kb-020");
    const auto* keyboard = kb.find("kb-017");
    ASSERT_NE(keyboard, nullptr);
    EXPECT_EQ(keyboard->category, Category::Others);
    EXPECT_EQ(keyboard->subcategory, "Behavior");
}

TEST(KbLoader, BlankLinesSkippedAndUnknownFieldsWarned) {
    std::vector<std::string> warnings;
    const auto kb = read("\n{\"id\":\"a\",\"term\":\"t\",\"category\":\"Racism\",\"definition\":\"d\",\"aliases\":[],"
                         "\"extra\":1}\n\n",
                         &warnings);
    EXPECT_EQ(kb.size(), 1u);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("extra"), std::string::npos);
}

TEST(KbLoader, MalformedLineReportsLineNumber) {
    try {
        read("{\"id\":\"a\",\"term\":\"t\",\"category\":\"Racism\",\"definition\":\"d\",\"aliases\":[]}\n{oops\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(KbLoader, DuplicateIdRejected) {
    const std::string line = "{\"id\":\"a\",\"term\":\"t\",\"category\":\"Racism\",\"definition\":\"d\",\"aliases\":[]}\n";
    try {
        read(line + line);
        FAIL() << "expected DuplicateId";
    } catch (const DuplicateId& e) {
        EXPECT_EQ(e.id(), "a");
    }
}

TEST(KbLoader, BlankDefinitionIsSchemaError) {
    try {
        read("{\"id\":\"a\",\"term\":\"t\",\"category\":\"Racism\",\"definition\":\"  \",\"aliases\":[]}\n");
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.field(), "definition");
    }
}

TEST(KbLoader, MissingFileIsIoError) { EXPECT_THROW(load_kb("/nonexistent/kb.jsonl"), IoError); }

TEST(KbLoader, SerializeRoundTrip) {
    const auto kb = load_kb(testkit::fixture("kb_small.jsonl"));
    std::ostringstream out;
    write_kb(out, kb);
    EXPECT_EQ(read(out.str()), kb);
}

TEST(KbStats, FixtureCounts) {
    const auto s = kb_stats(load_kb(testkit::fixture("kb_small.jsonl")));
    EXPECT_EQ(s.total, 20u);
    EXPECT_EQ(s.per_category.at("Sexism"), 5u);
    EXPECT_EQ(s.per_category.at("Racism"), 3u);
    EXPECT_EQ(s.per_category.at("Region"), 4u);
    EXPECT_EQ(s.per_category.at("LGBTQ"), 3u);
    EXPECT_EQ(s.per_category.at("Others"), 5u);
}

TEST(KbStats, EmptyKbHasZeroFilledCategories) {
    const auto s = kb_stats(KnowledgeBase{});
    EXPECT_EQ(s.total, 0u);
    EXPECT_EQ(s.per_category.size(), 5u);
    EXPECT_FALSE(s.mean_definition_chars.has_value());
}
