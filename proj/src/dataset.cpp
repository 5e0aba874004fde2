#include "memeattr/dataset.hpp"

#include <fstream>
#include <ostream>
#include <unordered_set>

#include "jsonl.hpp"
#include "memeattr/errors.hpp"
#include "memeattr/log.hpp"
#include "memeattr/stats.hpp"
#include "memeattr/utf8.hpp"

namespace memeattr::kb {

std::string_view to_string(HarmLabel label) noexcept {
    return label == HarmLabel::Harmful ? "harmful" : "non-harmful";
}

std::optional<HarmLabel> harm_label_from_string(std::string_view wire) {
    if (wire == "harmful") return HarmLabel::Harmful;
    if (wire == "non-harmful") return HarmLabel::NonHarmful;
    return std::nullopt;
}

std::string_view to_string(HarmType type) noexcept {
    switch (type) {
        case HarmType::Targeted: return "targeted";
        case HarmType::GeneralOffense: return "offense";
        case HarmType::SexualInnuendo: return "sexual";
        case HarmType::DisparagingCulture: return "disparaging";
    }
    return "targeted";
}

std::optional<HarmType> harm_type_from_string(std::string_view wire) {
    for (HarmType t : kAllHarmTypes) {
        if (to_string(t) == wire) return t;
    }
    return std::nullopt;
}

std::string_view to_string(Split split) noexcept { return split == Split::Train ? "train" : "test"; }

std::optional<Split> split_from_string(std::string_view wire) {
    if (wire == "train") return Split::Train;
    if (wire == "test") return Split::Test;
    return std::nullopt;
}

std::vector<std::string> validate_record(const MemeRecord& r) {
    std::vector<std::string> problems;
    if (utf8::trim(r.id).empty()) problems.emplace_back("id: empty");
    if (utf8::trim(r.text).empty() && utf8::trim(r.description).empty()) {
        problems.emplace_back("text: text and description are both empty");
    }
    if (r.label == HarmLabel::Harmful && !r.harm_type) {
        problems.emplace_back("harm_type: required for harmful records");
    }
    if (r.label == HarmLabel::NonHarmful && r.harm_type) {
        problems.emplace_back("harm_type: must be absent for non-harmful records");
    }
    if (utf8::trim(r.exp_harmful).empty()) problems.emplace_back("exp_harmful: empty");
    if (utf8::trim(r.exp_nonharmful).empty()) problems.emplace_back("exp_nonharmful: empty");
    return problems;
}

MemeRecord parse_record(std::string_view json_line, std::size_t line, std::vector<std::string>* warnings) {
    const auto obj = jsonl::parse_object(json_line, line);
    jsonl::note_unknown_fields(obj,
                               {"id", "image_ref", "text", "description", "label", "harm_type",
                                "exp_harmful", "exp_nonharmful", "split"},
                               line, warnings);
    const std::string at = " (line " + std::to_string(line) + ")";

    MemeRecord r;
    r.id = jsonl::required_string(obj, "id", line);
    r.image_ref = jsonl::optional_string(obj, "image_ref", line);
    r.text = jsonl::optional_string(obj, "text", line).value_or("");
    r.description = jsonl::optional_string(obj, "description", line).value_or("");

    const auto label = jsonl::required_string(obj, "label", line);
    auto parsed_label = harm_label_from_string(label);
    if (!parsed_label) throw SchemaError("label", "unknown value '" + label + "'" + at);
    r.label = *parsed_label;

    if (auto type = jsonl::optional_string(obj, "harm_type", line); type && !type->empty()) {
        auto parsed_type = harm_type_from_string(*type);
        if (!parsed_type) throw SchemaError("harm_type", "unknown value '" + *type + "'" + at);
        r.harm_type = *parsed_type;
    }

    r.exp_harmful = jsonl::required_string(obj, "exp_harmful", line);
    r.exp_nonharmful = jsonl::required_string(obj, "exp_nonharmful", line);

    const auto split = jsonl::required_string(obj, "split", line);
    auto parsed_split = split_from_string(split);
    if (!parsed_split) throw SchemaError("split", "unknown value '" + split + "'" + at);
    r.split = *parsed_split;

    if (auto problems = validate_record(r); !problems.empty()) {
        const auto& first = problems.front();
        throw SchemaError(first.substr(0, first.find(':')), first.substr(first.find(':') + 2) + at);
    }
    return r;
}

std::string serialize_record(const MemeRecord& r) {
    jsonl::json obj;
    obj["id"] = r.id;
    if (r.image_ref) obj["image_ref"] = *r.image_ref;
    obj["text"] = r.text;
    obj["description"] = r.description;
    obj["label"] = std::string(to_string(r.label));
    if (r.harm_type) obj["harm_type"] = std::string(to_string(*r.harm_type));
    obj["exp_harmful"] = r.exp_harmful;
    obj["exp_nonharmful"] = r.exp_nonharmful;
    obj["split"] = std::string(to_string(r.split));
    return jsonl::dump_line(obj);
}

std::vector<MemeRecord> read_dataset(std::istream& in, std::vector<std::string>* warnings) {
    std::vector<MemeRecord> records;
    std::unordered_set<std::string> seen;
    jsonl::for_each_line(in, [&](std::size_t line, std::string_view text) {
        auto r = parse_record(text, line, warnings);
        if (!seen.insert(r.id).second) throw DuplicateId(r.id);
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<MemeRecord> load_dataset(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file: " + path);
    return read_dataset(in, warnings);
}

void write_dataset(std::ostream& out, std::span<const MemeRecord> records) {
    for (const auto& r : records) out << serialize_record(r) << '\n';
}

DatasetStats dataset_stats(std::span<const MemeRecord> records) {
    DatasetStats s;
    for (Split sp : {Split::Train, Split::Test}) {
        const std::string key(to_string(sp));
        s.per_split[key] = 0;
        s.per_split_label[key]["harmful"] = 0;
        s.per_split_label[key]["non-harmful"] = 0;
        for (HarmType t : kAllHarmTypes) s.per_split_harm_type[key][std::string(to_string(t))] = 0;
    }
    for (HarmType t : kAllHarmTypes) s.per_harm_type[std::string(to_string(t))] = 0;

    std::vector<double> lengths;
    lengths.reserve(records.size() * 2);
    for (const auto& r : records) {
        const std::string split(to_string(r.split));
        ++s.total;
        ++s.per_split[split];
        ++s.per_split_label[split][std::string(to_string(r.label))];
        if (r.label == HarmLabel::Harmful) {
            ++s.harmful;
        } else {
            ++s.non_harmful;
        }
        if (r.harm_type) {
            const std::string type(to_string(*r.harm_type));
            ++s.per_harm_type[type];
            ++s.per_split_harm_type[split][type];
        }
        lengths.push_back(static_cast<double>(utf8::length(r.exp_harmful)));
        lengths.push_back(static_cast<double>(utf8::length(r.exp_nonharmful)));
    }
    s.explanation_count = lengths.size();
    if (auto ms = mean_and_population_std(lengths)) {
        s.mean_explanation_chars = ms->mean;
        s.std_explanation_chars = ms->std;
    }
    return s;
}

std::vector<std::string> reference_count_warnings(const DatasetStats& stats,
                                                  std::span<const PublishedSplitCounts> published) {
    std::vector<std::string> warnings;
    for (const auto& row : published) {
        const std::string split(to_string(row.split));
        std::size_t type_sum = 0;
        for (auto n : row.per_type) type_sum += n;
        if (type_sum != row.harmful) {
            warnings.push_back("published " + split + " row: harm-type counts sum to " +
                               std::to_string(type_sum) + " but the harmful total is " +
                               std::to_string(row.harmful));
        }
        const auto observed_harmful = stats.per_split_label.at(split).at("harmful");
        if (observed_harmful != row.harmful) {
            warnings.push_back("observed " + split + " harmful count " + std::to_string(observed_harmful) +
                               " differs from published " + std::to_string(row.harmful));
        }
        for (std::size_t i = 0; i < kAllHarmTypes.size(); ++i) {
            const std::string type(to_string(kAllHarmTypes[i]));
            const auto observed = stats.per_split_harm_type.at(split).at(type);
            if (observed != row.per_type[i]) {
                warnings.push_back("observed " + split + " '" + type + "' count " + std::to_string(observed) +
                                   " differs from published " + std::to_string(row.per_type[i]));
            }
        }
    }
    for (const auto& w : warnings) logger().warn("{}", w);
    return warnings;
}

}  // namespace memeattr::kb
