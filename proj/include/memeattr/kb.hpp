#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace memeattr::kb {

/// Canonical harmful-term classes. Anything else folds into Others.
enum class Category { Sexism, Racism, Region, Lgbtq, Others };

std::string_view to_string(Category c) noexcept;

/// Case-insensitive match against the canonical names (English or Chinese).
std::optional<Category> category_from_string(std::string_view raw);

/// One slang/cultural-term record of the knowledge base.
struct KbEntry {
    std::string id;
    std::string term;
    Category category = Category::Others;
    std::string subcategory;
    std::string definition;
    std::vector<std::string> aliases;
    std::string source;

    bool operator==(const KbEntry&) const = default;

    /// Text fed to the lexical and dense indexes: term, aliases, definition.
    std::string index_text() const;
};

/// Applies the category-folding rule: an unknown category becomes Others and
/// the raw string is kept as (the head of) the subcategory.
void assign_category(KbEntry& entry, std::string_view raw_category, std::string_view raw_subcategory);

/// Invariant violations as "field: problem" strings. Empty means valid.
std::vector<std::string> validate_entry(const KbEntry& entry);

/// Ordered, id-unique collection of entries. Immutable once loaded.
class KnowledgeBase {
public:
    KnowledgeBase() = default;

    /// Throws DuplicateId.
    explicit KnowledgeBase(std::vector<KbEntry> entries);

    const std::vector<KbEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    const KbEntry* find(std::string_view id) const;

    bool operator==(const KnowledgeBase& other) const { return entries_ == other.entries_; }

private:
    std::vector<KbEntry> entries_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Decodes one record without checking entry invariants. Throws ParseError
/// for malformed JSON and SchemaError for missing or mistyped fields.
KbEntry decode_entry(std::string_view json_line, std::size_t line,
                     std::vector<std::string>* warnings = nullptr);

/// Decodes and validates one line-delimited record. `line` is used for error messages only.
/// Unknown fields are reported through `warnings`.
KbEntry parse_entry(std::string_view json_line, std::size_t line,
                    std::vector<std::string>* warnings = nullptr);

std::string serialize_entry(const KbEntry& entry);

/// Reads a line-delimited knowledge base. Blank lines are skipped.
/// Throws ParseError (with line number), SchemaError, DuplicateId.
KnowledgeBase read_kb(std::istream& in, std::vector<std::string>* warnings = nullptr);

/// As read_kb, plus IoError when the file cannot be opened.
KnowledgeBase load_kb(const std::string& path, std::vector<std::string>* warnings = nullptr);

void write_kb(std::ostream& out, const KnowledgeBase& kb);

struct KbStats {
    std::size_t total = 0;
    std::map<std::string, std::size_t> per_category;  // all five categories, zero-filled
    std::optional<double> mean_definition_chars;
    std::optional<double> std_definition_chars;
};

KbStats kb_stats(const KnowledgeBase& kb);

}  // namespace memeattr::kb
