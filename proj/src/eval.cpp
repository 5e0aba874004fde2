#include "memeattr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "jsonl.hpp"
#include "memeattr/errors.hpp"
#include "memeattr/log.hpp"
#include "memeattr/parallel.hpp"
#include "memeattr/utf8.hpp"

namespace memeattr::eval {

using nlohmann::json;

namespace {

std::optional<rir::ParseStatus> parse_status_from_string(std::string_view s) {
    for (auto st : {rir::ParseStatus::Clean, rir::ParseStatus::Recovered, rir::ParseStatus::Fallback}) {
        if (rir::to_string(st) == s) return st;
    }
    return std::nullopt;
}

json optional_number(const std::optional<double>& v) {
    return v ? json(report_round(*v)) : json(nullptr);
}

std::string cell(const std::optional<double>& v, int decimals, double scale = 1.0) {
    return v ? fmt::format("{:.{}f}", *v * scale, decimals) : std::string("-");
}

std::string render_rows(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], utf8::length(row[i]));
    }
    std::string out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t i = 0; i < rows[r].size(); ++i) {
            if (i > 0) out += " | ";
            out += rows[r][i];
            if (i + 1 < rows[r].size()) out.append(widths[i] - utf8::length(rows[r][i]), ' ');
        }
        out += '\n';
        if (r == 0) {
            for (std::size_t i = 0; i < widths.size(); ++i) {
                if (i > 0) out += "-|-";
                out.append(widths[i], '-');
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace

json to_json(const DecisionRecord& record) {
    json obj;
    obj["id"] = record.id;
    obj["label"] = std::string(kb::to_string(record.decision.label));
    obj["reason"] = record.decision.reason;
    obj["raw_response"] = record.decision.raw_response;
    obj["parse_status"] = std::string(rir::to_string(record.decision.parse_status));
    json p_rels = json::array();
    for (const auto& [id, p] : record.p_rels) p_rels.push_back({{"id", id}, {"p_rel", report_round(p)}});
    obj["p_rels"] = std::move(p_rels);
    obj["config"] = record.config;
    return obj;
}

std::string serialize_decision_record(const DecisionRecord& record) { return jsonl::dump_line(to_json(record)); }

std::vector<DecisionRecord> read_decisions(std::istream& in) {
    std::vector<DecisionRecord> out;
    std::unordered_set<std::string> seen;
    jsonl::for_each_line(in, [&](std::size_t line, std::string_view text) {
        const auto obj = jsonl::parse_object(text, line);
        const std::string at = " (line " + std::to_string(line) + ")";
        DecisionRecord r;
        r.id = jsonl::required_string(obj, "id", line);
        const auto label = jsonl::required_string(obj, "label", line);
        auto parsed = kb::harm_label_from_string(label);
        if (!parsed) throw SchemaError("label", "unknown value '" + label + "'" + at);
        r.decision.label = *parsed;
        r.decision.reason = jsonl::required_string(obj, "reason", line);
        r.decision.raw_response = jsonl::optional_string(obj, "raw_response", line).value_or("");
        const auto status = jsonl::optional_string(obj, "parse_status", line).value_or("clean");
        auto parsed_status = parse_status_from_string(status);
        if (!parsed_status) throw SchemaError("parse_status", "unknown value '" + status + "'" + at);
        r.decision.parse_status = *parsed_status;
        if (auto it = obj.find("p_rels"); it != obj.end() && it->is_array()) {
            for (const auto& p : *it) {
                if (!p.is_object() || !p.contains("id") || !p.contains("p_rel") || !p["id"].is_string() ||
                    !p["p_rel"].is_number()) {
                    throw SchemaError("p_rels", "entries need a string id and a numeric p_rel" + at);
                }
                r.p_rels.emplace_back(p["id"].get<std::string>(), p["p_rel"].get<double>());
            }
        }
        if (auto it = obj.find("config"); it != obj.end()) r.config = *it;
        if (!seen.insert(r.id).second) throw DuplicateId(r.id);
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<DecisionRecord> load_decisions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open decisions file: " + path);
    return read_decisions(in);
}

double report_round(double x) {
    const double r = std::round(x * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

EvalReport evaluate_run(std::span<const DecisionRecord> decisions, std::span<const kb::MemeRecord> records,
                        const EvalOptions& options) {
    std::unordered_map<std::string_view, const DecisionRecord*> by_id;
    for (const auto& d : decisions) {
        if (!by_id.emplace(d.id, &d).second) throw IdMismatch("decision id '" + d.id + "' appears twice");
    }
    std::vector<const kb::MemeRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& r : records) {
        if (!by_id.count(r.id)) throw IdMismatch("no decision for record '" + r.id + "'");
        sorted.push_back(&r);
    }
    if (records.size() != decisions.size()) {
        for (const auto& d : decisions) {
            const bool known = std::any_of(records.begin(), records.end(), [&](const auto& r) { return r.id == d.id; });
            if (!known) throw IdMismatch("decision '" + d.id + "' has no gold record");
        }
        throw IdMismatch("a gold record id appears twice");
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->id == sorted[i - 1]->id) throw IdMismatch("record id '" + sorted[i]->id + "' appears twice");
    }

    EvalReport report;
    report.per_record.resize(sorted.size());
    parallel_for(sorted.size(), options.parallelism, [&](std::size_t i) {
        const auto& rec = *sorted[i];
        const auto& dec = *by_id.at(rec.id);
        auto& s = report.per_record[i];
        s.id = rec.id;
        s.gold = rec.label;
        s.pred = dec.decision.label;
        s.parse_status = dec.decision.parse_status;
        if (rec.label != HarmLabel::Harmful) return;
        s.bleu4 = bleu4(dec.decision.reason, rec.exp_harmful);
        s.rouge_l = rouge_l(dec.decision.reason, rec.exp_harmful);
        if (options.judge != nullptr) {
            s.likert = likert_judge(dec.decision.reason, {rec.text, rec.description}, *options.judge);
        }
    });

    std::vector<HarmLabel> pred, gold;
    double bleu_sum = 0.0, rouge_sum = 0.0;
    std::array<double, kLikertDims> likert_sum{};
    std::size_t likert_n = 0;
    for (const auto& s : report.per_record) {
        pred.push_back(s.pred);
        gold.push_back(s.gold);
        if (s.parse_status == rir::ParseStatus::Fallback) ++report.fallback_count;
        if (s.bleu4) {
            ++report.generation_count;
            bleu_sum += *s.bleu4;
            rouge_sum += *s.rouge_l;
        }
        if (s.likert) {
            ++likert_n;
            for (std::size_t k = 0; k < kLikertDims; ++k) likert_sum[k] += s.likert->values[k];
            if (s.likert->any_clamped()) ++report.likert_clamped;
        }
    }
    report.confusion = confusion(pred, gold);
    report.classification = prf1(report.confusion);
    if (report.generation_count > 0) {
        const auto n = static_cast<double>(report.generation_count);
        report.generation = GenerationScores{bleu_sum / n, rouge_sum / n};
    }
    if (likert_n > 0) {
        std::array<double, kLikertDims> means{};
        for (std::size_t k = 0; k < kLikertDims; ++k) means[k] = likert_sum[k] / static_cast<double>(likert_n);
        report.likert_means = means;
    }
    if (options.judge != nullptr) report.judge = options.judge->name();
    if (report.fallback_count > 0) {
        logger().warn("{} of {} decisions used the non-harmful fallback", report.fallback_count,
                      report.per_record.size());
    }
    return report;
}

json report_to_json(const EvalReport& report, const json& config) {
    json out;
    const auto& c = report.classification;
    out["classification"] = {{"acc", optional_number(c.accuracy)},
                             {"p", optional_number(c.precision)},
                             {"r", optional_number(c.recall)},
                             {"f1", optional_number(c.f1)},
                             {"n", report.confusion.total()},
                             {"fallback_count", report.fallback_count}};
    out["confusion"] = {{"tp", report.confusion.tp},
                        {"fp", report.confusion.fp},
                        {"fn", report.confusion.fn},
                        {"tn", report.confusion.tn}};
    json gen = {{"n", report.generation_count}, {"bleu4", nullptr}, {"rouge_l", nullptr}};
    if (report.generation) {
        gen["bleu4"] = report_round(report.generation->bleu4);
        gen["rouge_l"] = report_round(report.generation->rouge_l);
    }
    out["generation"] = std::move(gen);
    if (report.likert_means) {
        json lk;
        for (std::size_t k = 0; k < kLikertDims; ++k) {
            lk[std::string(kLikertDimensionNames[k])] = report_round((*report.likert_means)[k]);
        }
        lk["clamped_records"] = report.likert_clamped;
        lk["judge"] = report.judge.value_or("");
        lk["rubric"] = std::string(kRubricVersion);
        out["likert"] = std::move(lk);
    } else {
        out["likert"] = nullptr;
    }
    json rows = json::array();
    for (const auto& s : report.per_record) {
        json row = {{"id", s.id},
                    {"gold", std::string(kb::to_string(s.gold))},
                    {"pred", std::string(kb::to_string(s.pred))},
                    {"parse_status", std::string(rir::to_string(s.parse_status))},
                    {"bleu4", optional_number(s.bleu4)},
                    {"rouge_l", optional_number(s.rouge_l)}};
        if (s.likert) {
            json lk = json::array();
            for (double v : s.likert->values) lk.push_back(v);
            row["likert"] = std::move(lk);
        }
        rows.push_back(std::move(row));
    }
    out["per_record"] = std::move(rows);
    out["config"] = config;
    return out;
}

std::string render_classification_table(std::span<const ClassificationRow> rows) {
    std::vector<std::vector<std::string>> table{{"Model", "Method", "Acc", "P", "R", "F1"}};
    for (const auto& r : rows) {
        table.push_back({r.model, r.method, cell(r.report.accuracy, 3), cell(r.report.precision, 3),
                         cell(r.report.recall, 3), cell(r.report.f1, 3)});
    }
    return render_rows(table);
}

std::string render_generation_table(std::span<const GenerationRow> rows, bool with_human) {
    std::vector<std::vector<std::string>> table{
        {"Method", "BLEU", "ROUGE", "Inf.", "Sound.", "Cult.", "Conc.", "Pers."}};
    auto likert_cells = [](std::vector<std::string>& row, const std::optional<std::array<double, kLikertDims>>& l) {
        for (std::size_t k = 0; k < kLikertDims; ++k) {
            row.push_back(l ? fmt::format("{:.2f}", (*l)[k]) : std::string("-"));
        }
    };
    for (const auto& r : rows) {
        std::vector<std::string> row{r.method};
        row.push_back(r.scores ? cell(r.scores->bleu4, 2, 100.0) : "-");
        row.push_back(r.scores ? cell(r.scores->rouge_l, 2, 100.0) : "-");
        likert_cells(row, r.likert);
        table.push_back(std::move(row));
    }
    if (with_human) {
        std::vector<std::string> row{"human", "-", "-"};
        likert_cells(row, kHumanReferenceLikert);
        table.push_back(std::move(row));
    }
    return render_rows(table);
}

}  // namespace memeattr::eval
