#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memeattr::kb {

enum class HarmLabel { Harmful, NonHarmful };

/// Wire form: "harmful" / "non-harmful".
std::string_view to_string(HarmLabel label) noexcept;
std::optional<HarmLabel> harm_label_from_string(std::string_view wire);

enum class HarmType { Targeted, GeneralOffense, SexualInnuendo, DisparagingCulture };

/// Wire form: "targeted" / "offense" / "sexual" / "disparaging".
std::string_view to_string(HarmType type) noexcept;
std::optional<HarmType> harm_type_from_string(std::string_view wire);

inline constexpr std::array<HarmType, 4> kAllHarmTypes = {
    HarmType::Targeted, HarmType::GeneralOffense, HarmType::SexualInnuendo,
    HarmType::DisparagingCulture};

enum class Split { Train, Test };

std::string_view to_string(Split split) noexcept;
std::optional<Split> split_from_string(std::string_view wire);

/// One annotated meme: image handle, embedded text, image description, gold
/// label and the two opposing interpretations.
struct MemeRecord {
    std::string id;
    std::optional<std::string> image_ref;
    std::string text;
    std::string description;
    HarmLabel label = HarmLabel::NonHarmful;
    std::optional<HarmType> harm_type;
    std::string exp_harmful;
    std::string exp_nonharmful;
    Split split = Split::Train;

    bool operator==(const MemeRecord&) const = default;
};

/// Record-level invariants as "field: problem" strings.
std::vector<std::string> validate_record(const MemeRecord& record);

/// Decodes and validates one line. Throws ParseError, SchemaError.
MemeRecord parse_record(std::string_view json_line, std::size_t line,
                        std::vector<std::string>* warnings = nullptr);

std::string serialize_record(const MemeRecord& record);

/// Reads a line-delimited dataset, preserving order. Empty input is valid.
/// Throws ParseError, SchemaError, DuplicateId.
std::vector<MemeRecord> read_dataset(std::istream& in, std::vector<std::string>* warnings = nullptr);

/// As read_dataset, plus IoError when the file cannot be opened.
std::vector<MemeRecord> load_dataset(const std::string& path,
                                     std::vector<std::string>* warnings = nullptr);

void write_dataset(std::ostream& out, std::span<const MemeRecord> records);

struct DatasetStats {
    std::size_t total = 0;
    std::size_t harmful = 0;
    std::size_t non_harmful = 0;
    std::map<std::string, std::size_t> per_split;                       // "train", "test"
    std::map<std::string, std::map<std::string, std::size_t>> per_split_label;
    std::map<std::string, std::size_t> per_harm_type;                   // harmful records only
    std::map<std::string, std::map<std::string, std::size_t>> per_split_harm_type;
    std::size_t explanation_count = 0;                                  // two per record
    std::optional<double> mean_explanation_chars;
    std::optional<double> std_explanation_chars;                        // population
};

/// Counts plus explanation-length moments over both interpretations of every
/// record, measured in Unicode scalar values.
DatasetStats dataset_stats(std::span<const MemeRecord> records);

/// A published per-split row: harmful total and per-type counts in
/// kAllHarmTypes order.
struct PublishedSplitCounts {
    Split split = Split::Train;
    std::size_t harmful = 0;
    std::array<std::size_t, 4> per_type{};
};

/// Cross-checks observed statistics against published rows. Inconsistencies
/// (including rows whose own per-type counts do not add up) come back as
/// warnings; nothing here throws.
std::vector<std::string> reference_count_warnings(const DatasetStats& stats,
                                                  std::span<const PublishedSplitCounts> published);

/// Published harmful counts of the reference corpus (7,042 records, 3,735
/// harmful). The per-type figures of both rows exceed their harmful totals.
inline constexpr std::array<PublishedSplitCounts, 2> kReferenceSplitCounts = {{
    {Split::Train, 2988, {711, 862, 1093, 862}},
    {Split::Test, 747, {178, 216, 274, 178}},
}};

}  // namespace memeattr::kb
