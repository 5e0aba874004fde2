#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "memeattr/dataset.hpp"
#include "memeattr/metrics.hpp"
#include "memeattr/rir.hpp"

namespace memeattr::eval {

/// One line of an attribution output file.
struct DecisionRecord {
    std::string id;
    rir::Decision decision;
    std::vector<std::pair<std::string, double>> p_rels;  // gated fragments, best first
    nlohmann::json config = nlohmann::json::object();
};

nlohmann::json to_json(const DecisionRecord& record);
std::string serialize_decision_record(const DecisionRecord& record);

/// Needs id, label, reason; parse_status defaults to "clean". Throws
/// ParseError, SchemaError, DuplicateId.
std::vector<DecisionRecord> read_decisions(std::istream& in);
std::vector<DecisionRecord> load_decisions(const std::string& path);

struct RecordScore {
    std::string id;
    HarmLabel gold = HarmLabel::NonHarmful;
    HarmLabel pred = HarmLabel::NonHarmful;
    rir::ParseStatus parse_status = rir::ParseStatus::Clean;
    // Generation metrics exist only for gold-harmful records.
    std::optional<double> bleu4;
    std::optional<double> rouge_l;
    std::optional<LikertScores> likert;
};

struct EvalOptions {
    /// Set to run the Likert pass over the gold-harmful subset.
    model::ModelBackend* judge = nullptr;
    std::size_t parallelism = 4;
};

struct EvalReport {
    ConfusionCounts confusion;
    ClassificationReport classification;
    std::size_t generation_count = 0;
    std::optional<GenerationScores> generation;  // absent when no record is gold-harmful
    std::optional<std::array<double, kLikertDims>> likert_means;
    std::size_t likert_clamped = 0;
    std::optional<std::string> judge;
    std::size_t fallback_count = 0;
    std::vector<RecordScore> per_record;  // ascending id
};

/// Joins decisions to records by id. Classification covers every pair;
/// BLEU-4 / ROUGE-L (mean of sentence scores) and Likert cover the gold-harmful
/// subset with exp_harmful as the reference. Independent of input order.
/// Throws IdMismatch when the two id sets differ or decisions repeat an id.
EvalReport evaluate_run(std::span<const DecisionRecord> decisions, std::span<const kb::MemeRecord> records,
                        const EvalOptions& options = {});

/// Rounds to 1e-6 so reports compare byte-for-byte across platforms.
double report_round(double x);

/// {classification, confusion, generation, likert, per_record, config}.
nlohmann::json report_to_json(const EvalReport& report, const nlohmann::json& config);

struct ClassificationRow {
    std::string model;
    std::string method;
    ClassificationReport report;
};

/// Model | Method | Acc | P | R | F1, three decimals, "-" for absent cells.
std::string render_classification_table(std::span<const ClassificationRow> rows);

struct GenerationRow {
    std::string method;
    std::optional<GenerationScores> scores;
    std::optional<std::array<double, kLikertDims>> likert;
};

/// Method | BLEU | ROUGE | five Likert columns; BLEU and ROUGE on a 0-100
/// scale. With `with_human`, a final row holds the human reference scores.
std::string render_generation_table(std::span<const GenerationRow> rows, bool with_human = true);

}  // namespace memeattr::eval
