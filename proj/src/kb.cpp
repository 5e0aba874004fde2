#include "memeattr/kb.hpp"

#include <fstream>
#include <ostream>

#include "jsonl.hpp"
#include "memeattr/errors.hpp"
#include "memeattr/stats.hpp"
#include "memeattr/utf8.hpp"

namespace memeattr::kb {

namespace {

constexpr Category kAllCategories[] = {Category::Sexism, Category::Racism, Category::Region,
                                       Category::Lgbtq, Category::Others};

}  // namespace

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::Sexism: return "Sexism";
        case Category::Racism: return "Racism";
        case Category::Region: return "Region";
        case Category::Lgbtq: return "LGBTQ";
        case Category::Others: return "Others";
    }
    return "Others";
}

std::optional<Category> category_from_string(std::string_view raw) {
    const std::string key = utf8::fold_case_width(utf8::trim(raw));
    if (key == "sexism" || key == "性别" || key == "性别歧视") return Category::Sexism;
    if (key == "racism" || key == "种族" || key == "种族歧视") return Category::Racism;
    if (key == "region" || key == "地域" || key == "地域歧视") return Category::Region;
    if (key == "lgbtq" || key == "性少数") return Category::Lgbtq;
    if (key == "others" || key == "other" || key == "其他") return Category::Others;
    return std::nullopt;
}

std::string KbEntry::index_text() const {
    std::string out = term;
    for (const auto& alias : aliases) {
        out += ' ';
        out += alias;
    }
    out += ' ';
    out += definition;
    return out;
}

void assign_category(KbEntry& entry, std::string_view raw_category, std::string_view raw_subcategory) {
    std::string sub = utf8::trim(raw_subcategory);
    if (auto c = category_from_string(raw_category)) {
        entry.category = *c;
        entry.subcategory = std::move(sub);
        return;
    }
    entry.category = Category::Others;
    std::string raw = utf8::trim(raw_category);
    if (sub.empty()) {
        entry.subcategory = std::move(raw);
    } else if (raw.empty()) {
        entry.subcategory = std::move(sub);
    } else {
        entry.subcategory = raw + "/" + sub;
    }
}

std::vector<std::string> validate_entry(const KbEntry& entry) {
    std::vector<std::string> problems;
    if (utf8::trim(entry.id).empty()) problems.emplace_back("id: empty");
    if (utf8::trim(entry.term).empty()) problems.emplace_back("term: empty");
    if (utf8::trim(entry.definition).empty()) problems.emplace_back("definition: empty");
    for (std::size_t i = 0; i < entry.aliases.size(); ++i) {
        if (utf8::trim(entry.aliases[i]).empty()) {
            problems.push_back("aliases[" + std::to_string(i) + "]: empty");
        }
    }
    return problems;
}

KnowledgeBase::KnowledgeBase(std::vector<KbEntry> entries) : entries_(std::move(entries)) {
    by_id_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!by_id_.emplace(entries_[i].id, i).second) throw DuplicateId(entries_[i].id);
    }
}

const KbEntry* KnowledgeBase::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &entries_[it->second];
}

KbEntry decode_entry(std::string_view json_line, std::size_t line, std::vector<std::string>* warnings) {
    const auto obj = jsonl::parse_object(json_line, line);
    jsonl::note_unknown_fields(
        obj, {"id", "term", "category", "subcategory", "definition", "aliases", "source"}, line, warnings);

    KbEntry entry;
    entry.id = jsonl::required_string(obj, "id", line);
    entry.term = jsonl::required_string(obj, "term", line);
    entry.definition = jsonl::required_string(obj, "definition", line);
    assign_category(entry, jsonl::optional_string(obj, "category", line).value_or(""),
                    jsonl::optional_string(obj, "subcategory", line).value_or(""));
    entry.aliases = jsonl::string_list(obj, "aliases", line);
    entry.source = jsonl::optional_string(obj, "source", line).value_or("");
    return entry;
}

KbEntry parse_entry(std::string_view json_line, std::size_t line, std::vector<std::string>* warnings) {
    KbEntry entry = decode_entry(json_line, line, warnings);
    if (auto problems = validate_entry(entry); !problems.empty()) {
        const auto& first = problems.front();
        throw SchemaError(first.substr(0, first.find(':')),
                          "invalid entry '" + entry.id + "' (line " + std::to_string(line) + ")");
    }
    return entry;
}

std::string serialize_entry(const KbEntry& entry) {
    jsonl::json obj;
    obj["id"] = entry.id;
    obj["term"] = entry.term;
    obj["category"] = std::string(to_string(entry.category));
    if (!entry.subcategory.empty()) obj["subcategory"] = entry.subcategory;
    obj["definition"] = entry.definition;
    obj["aliases"] = entry.aliases;
    if (!entry.source.empty()) obj["source"] = entry.source;
    return jsonl::dump_line(obj);
}

KnowledgeBase read_kb(std::istream& in, std::vector<std::string>* warnings) {
    std::vector<KbEntry> entries;
    jsonl::for_each_line(in, [&](std::size_t line, std::string_view text) {
        entries.push_back(parse_entry(text, line, warnings));
    });
    return KnowledgeBase(std::move(entries));
}

KnowledgeBase load_kb(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open knowledge base file: " + path);
    return read_kb(in, warnings);
}

void write_kb(std::ostream& out, const KnowledgeBase& kb) {
    for (const auto& entry : kb.entries()) out << serialize_entry(entry) << '\n';
}

KbStats kb_stats(const KnowledgeBase& kb) {
    KbStats stats;
    stats.total = kb.size();
    for (Category c : kAllCategories) stats.per_category[std::string(to_string(c))] = 0;
    std::vector<double> lengths;
    lengths.reserve(kb.size());
    for (const auto& e : kb.entries()) {
        ++stats.per_category[std::string(to_string(e.category))];
        lengths.push_back(static_cast<double>(utf8::length(e.definition)));
    }
    if (auto ms = mean_and_population_std(lengths)) {
        stats.mean_definition_chars = ms->mean;
        stats.std_definition_chars = ms->std;
    }
    return stats;
}

}  // namespace memeattr::kb
