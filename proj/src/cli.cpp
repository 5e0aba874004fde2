#include "memeattr/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "jsonl.hpp"
#include "memeattr/ake.hpp"
#include "memeattr/config.hpp"
#include "memeattr/dataset.hpp"
#include "memeattr/errors.hpp"
#include "memeattr/eval.hpp"
#include "memeattr/index_store.hpp"
#include "memeattr/io.hpp"
#include "memeattr/kb.hpp"
#include "memeattr/log.hpp"
#include "memeattr/parallel.hpp"
#include "memeattr/rir.hpp"
#include "memeattr/tokenizer.hpp"
#include "memeattr/utf8.hpp"

#ifndef MEMEATTR_BUILD_ID
#define MEMEATTR_BUILD_ID "unknown"
#endif

namespace memeattr::cli {

using nlohmann::json;

namespace {

/// Flags shared by every subcommand plus the subcommand's own values.
struct Context {
    std::optional<std::string> config_path;
    config::Overrides o;
    bool mock = false;

    // Positional and subcommand-specific values.
    std::string path;
    std::string kb;
    std::string index;
    std::string out;
    std::string text;
    std::string desc;
    std::string record;
    std::string pred;
    std::string gold;
    std::size_t query_k = 5;
    bool check_reference = false;
    bool generate_stances = false;
    bool likert = false;
    bool table = false;
};

void add_common(CLI::App* sub, Context& ctx) {
    sub->add_option("--config", ctx.config_path, "JSON config file (defaults < file < flags)");
    sub->add_flag("--mock", ctx.mock, "Use the deterministic offline backend; no network access");
    sub->add_option("--mock-scenarios", ctx.o.mock_scenarios, "Scenario file for the mock backend");
    sub->add_option("--base-url", ctx.o.base_url, "OpenAI-compatible endpoint for every model role");
    sub->add_option("--model", ctx.o.model, "Model name for every model role");
    sub->add_option("--api-key-env", ctx.o.api_key_env, "Environment variable holding the API key");
    sub->add_option("--parallelism", ctx.o.parallelism, "Maximum concurrent model calls");
    sub->add_option("--log-level", ctx.o.log_level, "trace, debug, info, warn, error or off");
}

void add_retrieval(CLI::App* sub, Context& ctx) {
    sub->add_option("--w-bm25", ctx.o.w_bm25, "Lexical weight of the hybrid score");
    sub->add_option("--w-dense", ctx.o.w_dense, "Dense weight of the hybrid score");
    sub->add_option("--tau", ctx.o.tau_rel, "Relevance threshold of the gate");
    sub->add_option("--k", ctx.o.k_final, "Fragments kept after the gate");
    sub->add_option("--k-candidates", ctx.o.k_candidates, "Candidates passed to the reranker");
}

config::AppConfig effective_config(Context& ctx) {
    if (ctx.mock) ctx.o.mock = true;
    auto cfg = config::load_config(ctx.config_path, ctx.o);
    set_log_level(cfg.log_level);
    return cfg;
}

void emit(const std::string& out_path, std::ostream& out, const std::string& content) {
    if (out_path.empty()) {
        out << content;
    } else {
        write_file_atomic(out_path, content);
    }
}

std::string pretty(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

json optional_json(const std::optional<double>& v) { return v ? json(eval::report_round(*v)) : json(nullptr); }

text::KnowledgeIndex load_checked_index(const std::string& path, const model::ModelBackend& embedder) {
    auto index = text::load_index(path);
    if (index.embedder != embedder.name()) {
        throw IndexMismatch("index was embedded with '" + index.embedder + "' but this run uses '" +
                            embedder.name() + "'");
    }
    return index;
}

// ---------------------------------------------------------------------------

int kb_validate(Context& ctx, std::ostream& out) {
    std::ifstream in(ctx.path, std::ios::binary);
    if (!in) throw IoError("cannot open knowledge base file: " + ctx.path);
    std::size_t entries = 0;
    std::vector<std::string> warnings;
    json problems = json::array();
    std::unordered_set<std::string> ids;
    jsonl::for_each_line(in, [&](std::size_t line, std::string_view text) {
        ++entries;
        try {
            const auto e = kb::decode_entry(text, line, &warnings);
            for (const auto& p : kb::validate_entry(e)) problems.push_back({{"line", line}, {"id", e.id}, {"problem", p}});
            if (!ids.insert(e.id).second) {
                problems.push_back({{"line", line}, {"id", e.id}, {"problem", "id: duplicate"}});
            }
        } catch (const DataError& err) {
            problems.push_back({{"line", line}, {"id", nullptr}, {"problem", err.what()}});
        }
    });
    const bool valid = problems.empty();
    out << pretty({{"entries", entries}, {"valid", valid}, {"problems", problems}, {"warnings", warnings}});
    return valid ? 0 : 2;
}

int kb_stats_cmd(Context& ctx, std::ostream& out) {
    std::vector<std::string> warnings;
    const auto kb = kb::load_kb(ctx.path, &warnings);
    const auto s = kb::kb_stats(kb);
    out << pretty({{"total", s.total},
                   {"per_category", s.per_category},
                   {"mean_definition_chars", optional_json(s.mean_definition_chars)},
                   {"std_definition_chars", optional_json(s.std_definition_chars)},
                   {"warnings", warnings}});
    return 0;
}

int dataset_stats_cmd(Context& ctx, std::ostream& out) {
    std::vector<std::string> warnings;
    const auto records = kb::load_dataset(ctx.path, &warnings);
    const auto s = kb::dataset_stats(records);
    json j = {{"total", s.total},
              {"harmful", s.harmful},
              {"non_harmful", s.non_harmful},
              {"per_split", s.per_split},
              {"per_split_label", s.per_split_label},
              {"per_harm_type", s.per_harm_type},
              {"per_split_harm_type", s.per_split_harm_type},
              {"explanation_count", s.explanation_count},
              {"mean_explanation_chars", optional_json(s.mean_explanation_chars)},
              {"std_explanation_chars", optional_json(s.std_explanation_chars)},
              {"warnings", warnings}};
    if (ctx.check_reference) j["reference_warnings"] = kb::reference_count_warnings(s, kb::kReferenceSplitCounts);
    out << pretty(j);
    return 0;
}

int index_build(Context& ctx, std::ostream& out) {
    if (!ctx.kb.empty()) ctx.o.kb_path = ctx.kb;
    if (!ctx.out.empty()) ctx.o.index_path = ctx.out;
    const auto cfg = effective_config(ctx);
    if (cfg.kb_path.empty() || cfg.index_path.empty()) throw UsageError("index build needs --kb and --out");
    const auto backends = config::make_backends(cfg);
    auto& embedder = backends.need("embedder");
    auto index = text::build_knowledge_index(kb::load_kb(cfg.kb_path), embedder, cfg.dim);
    text::save_index(cfg.index_path, index);
    out << pretty({{"entries", index.kb.size()},
                   {"terms", index.bm25.postings().size()},
                   {"dim", index.dense.dim()},
                   {"embedder", index.embedder},
                   {"format_version", text::kIndexFormatVersion}});
    return 0;
}

int index_query(Context& ctx, std::ostream& out) {
    if (!ctx.index.empty()) ctx.o.index_path = ctx.index;
    const auto cfg = effective_config(ctx);
    if (cfg.index_path.empty()) throw UsageError("index query needs --index");
    if (ctx.query_k == 0) throw InvalidArgument("--k must be positive");
    const auto backends = config::make_backends(cfg);
    auto& embedder = backends.need("embedder");
    const auto index = load_checked_index(cfg.index_path, embedder);
    const auto tokens = text::tokenize(ctx.text);
    const std::vector<std::string> texts{ctx.text};
    const auto qvec = embedder.embed_texts(texts, index.dense.dim());
    const auto hits = text::top_k(index.bm25, index.dense, tokens, qvec.at(0), cfg.ake.weights, ctx.query_k);
    out << "rank\tdoc_id\tterm\ts_hybrid\ts_bm25\ts_dense\n";
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const auto& h = hits[i];
        out << fmt::format("{}\t{}\t{}\t{:.6f}\t{:.6f}\t{:.6f}\n", i + 1, h.doc_id, index.entry(h.doc_id).term,
                           h.s_hybrid, h.s_bm25, h.s_dense);
    }
    return 0;
}

ake::Models models_of(const config::Backends& b) {
    return ake::Models{b.need("expansion"), b.need("embedder"), b.need("rerank")};
}

int retrieve_cmd(Context& ctx, std::ostream& out) {
    if (!ctx.index.empty()) ctx.o.index_path = ctx.index;
    const auto cfg = effective_config(ctx);
    if (cfg.index_path.empty()) throw UsageError("retrieve needs --index");
    const auto backends = config::make_backends(cfg);
    const auto index = load_checked_index(cfg.index_path, backends.need("embedder"));
    const auto ctx_k = ake::run_ake(ake::MemeInput{ctx.text, ctx.desc}, index, models_of(backends), cfg.ake);
    out << "doc_id\tterm\tp_rel\ts_hybrid\n";
    for (const auto& f : ctx_k.fragments) {
        out << fmt::format("{}\t{}\t{:.6f}\t{:.6f}\n", f.entry.id, f.entry.term, f.p_rel, f.s_hybrid);
    }
    return 0;
}

std::vector<kb::MemeRecord> read_record_arg(const std::string& arg) {
    const auto trimmed = utf8::trim(arg);
    if (!trimmed.empty() && trimmed.front() == '{') {
        std::istringstream in(trimmed);
        return kb::read_dataset(in);
    }
    return kb::load_dataset(arg);
}

int attribute_cmd(Context& ctx, std::ostream& out) {
    if (!ctx.index.empty()) ctx.o.index_path = ctx.index;
    const auto cfg = effective_config(ctx);
    if (cfg.index_path.empty()) throw UsageError("attribute needs --index");
    if (ctx.record.empty()) throw UsageError("attribute needs --record");
    const auto backends = config::make_backends(cfg);
    const auto index = load_checked_index(cfg.index_path, backends.need("embedder"));
    const auto records = read_record_arg(ctx.record);
    const auto models = models_of(backends);
    auto& attributor = backends.need("attribution");
    const json config_echo = config::to_json(cfg);

    std::vector<eval::DecisionRecord> results(records.size());
    parallel_for(records.size(), cfg.parallelism, [&](std::size_t i) {
        const auto& r = records[i];
        rir::AttributionInput input;
        input.meme = rir::MemeTuple::from_record(r);
        input.knowledge = ake::run_ake(r, index, models, cfg.ake);
        if (ctx.generate_stances) {
            input.exp_nonharmful = rir::generate_stance(input.meme, input.knowledge, kb::HarmLabel::NonHarmful,
                                                        attributor, cfg.stance_budget, cfg.language);
            input.exp_harmful = rir::generate_stance(input.meme, input.knowledge, kb::HarmLabel::Harmful,
                                                     attributor, cfg.stance_budget, cfg.language);
        } else {
            input.exp_nonharmful = r.exp_nonharmful;
            input.exp_harmful = r.exp_harmful;
        }
        rir::AttributeOptions opts;
        opts.prompt.language = cfg.language;
        auto& res = results[i];
        res.id = r.id;
        res.decision = rir::attribute(input, attributor, opts);
        for (const auto& f : input.knowledge.fragments) res.p_rels.emplace_back(f.entry.id, f.p_rel);
        res.config = config_echo;
        res.config["generate_stances"] = ctx.generate_stances;
    });

    std::string content;
    for (const auto& r : results) {
        content += eval::serialize_decision_record(r);
        content += '\n';
    }
    emit(ctx.out, out, content);
    return 0;
}

int eval_cmd(Context& ctx, std::ostream& out) {
    if (!ctx.gold.empty()) ctx.o.dataset_path = ctx.gold;
    const auto cfg = effective_config(ctx);
    if (ctx.pred.empty() || cfg.dataset_path.empty()) throw UsageError("eval needs --pred and --gold");
    const auto decisions = eval::load_decisions(ctx.pred);
    const auto records = kb::load_dataset(cfg.dataset_path);

    std::optional<config::Backends> backends;
    eval::EvalOptions options;
    options.parallelism = cfg.parallelism;
    if (ctx.likert) {
        backends = config::make_backends(cfg);
        options.judge = &backends->need("judge");
    }
    const auto report = eval::evaluate_run(decisions, records, options);

    json echo = config::to_json(cfg);
    echo["likert"] = ctx.likert;
    // The attribution settings travel with the decisions; echo them when uniform.
    if (!decisions.empty()) {
        const auto& first = decisions.front().config;
        const bool uniform = std::all_of(decisions.begin(), decisions.end(),
                                         [&](const eval::DecisionRecord& d) { return d.config == first; });
        echo["attribution"] = uniform ? first : json("mixed");
    }
    emit(ctx.out, out, pretty(eval::report_to_json(report, echo)));

    if (ctx.table) {
        const std::vector<eval::ClassificationRow> cls{{"-", "run", report.classification}};
        const std::vector<eval::GenerationRow> gen{{"run", report.generation, report.likert_means}};
        out << eval::render_classification_table(cls) << '\n' << eval::render_generation_table(gen);
    }
    return 0;
}

}  // namespace

std::string version_string() {
    return fmt::format("memeattr {} (build {}), index format {}", MEMEATTR_VERSION, MEMEATTR_BUILD_ID,
                       text::kIndexFormatVersion);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Retrieval-augmented harmful meme attribution", "memeattr"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    Context ctx;
    int (*handler)(Context&, std::ostream&) = nullptr;
    auto on = [&](CLI::App* sub, int (*fn)(Context&, std::ostream&)) {
        sub->callback([&handler, fn] { handler = fn; });
    };

    auto* kb_cmd = app.add_subcommand("kb", "Knowledge base files");
    kb_cmd->require_subcommand(1);
    auto* kb_val = kb_cmd->add_subcommand("validate", "Check every entry against the schema");
    kb_val->add_option("path", ctx.path, "Knowledge base file")->required();
    on(kb_val, kb_validate);
    auto* kb_st = kb_cmd->add_subcommand("stats", "Entry counts per category");
    kb_st->add_option("path", ctx.path, "Knowledge base file")->required();
    on(kb_st, kb_stats_cmd);

    auto* ds_cmd = app.add_subcommand("dataset", "Dataset files");
    ds_cmd->require_subcommand(1);
    auto* ds_st = ds_cmd->add_subcommand("stats", "Label, split and harm-type counts");
    ds_st->add_option("path", ctx.path, "Dataset file")->required();
    ds_st->add_flag("--check-reference", ctx.check_reference, "Compare against the published corpus counts");
    on(ds_st, dataset_stats_cmd);

    auto* idx_cmd = app.add_subcommand("index", "Retrieval index");
    idx_cmd->require_subcommand(1);
    auto* idx_build = idx_cmd->add_subcommand("build", "Index a knowledge base");
    idx_build->add_option("--kb", ctx.kb, "Knowledge base file");
    idx_build->add_option("--out", ctx.out, "Index file to write");
    idx_build->add_option("--dim", ctx.o.dim, "Embedding dimension");
    add_common(idx_build, ctx);
    on(idx_build, index_build);
    auto* idx_query = idx_cmd->add_subcommand("query", "Hybrid top-k for one query");
    idx_query->add_option("--index", ctx.index, "Index file");
    idx_query->add_option("--text", ctx.text, "Query text")->required();
    idx_query->add_option("--k", ctx.query_k, "Number of hits");
    idx_query->add_option("--w-bm25", ctx.o.w_bm25, "Lexical weight of the hybrid score");
    idx_query->add_option("--w-dense", ctx.o.w_dense, "Dense weight of the hybrid score");
    add_common(idx_query, ctx);
    on(idx_query, index_query);

    auto* ret = app.add_subcommand("retrieve", "Background knowledge for one meme");
    ret->add_option("--index", ctx.index, "Index file");
    ret->add_option("--text", ctx.text, "Meme text");
    ret->add_option("--desc", ctx.desc, "Image description");
    add_retrieval(ret, ctx);
    add_common(ret, ctx);
    on(ret, retrieve_cmd);

    auto* att = app.add_subcommand("attribute", "Harmful / non-harmful decisions with reasons");
    att->add_option("--index", ctx.index, "Index file");
    att->add_option("--record", ctx.record, "Dataset file, or one dataset line")->required();
    att->add_flag("--generate-stances", ctx.generate_stances, "Generate both interpretations instead of using the annotated pair");
    att->add_option("--out", ctx.out, "Output file (line-delimited decisions)");
    att->add_option("--lang", ctx.o.language, "Prompt language: auto, zh or en");
    att->add_option("--stance-budget", ctx.o.stance_budget, "Character cap of generated interpretations");
    add_retrieval(att, ctx);
    add_common(att, ctx);
    on(att, attribute_cmd);

    auto* ev = app.add_subcommand("eval", "Score decisions against gold labels and explanations");
    ev->add_option("--pred", ctx.pred, "Decisions file")->required();
    ev->add_option("--gold", ctx.gold, "Dataset file");
    ev->add_flag("--likert", ctx.likert, "Judge harmful-subset explanations on five Likert dimensions");
    ev->add_flag("--table", ctx.table, "Also print plain-text tables to stdout");
    ev->add_option("--out", ctx.out, "Report file");
    add_common(ev, ctx);
    on(ev, eval_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << version_string() << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    if (handler == nullptr) {
        err << app.help();
        return 1;
    }
    try {
        return handler(ctx, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace memeattr::cli
