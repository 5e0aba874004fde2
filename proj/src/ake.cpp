#include "memeattr/ake.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "memeattr/errors.hpp"
#include "memeattr/log.hpp"
#include "memeattr/parallel.hpp"
#include "memeattr/tokenizer.hpp"
#include "memeattr/utf8.hpp"

namespace memeattr::ake {

std::string_view to_string(QuerySource source) noexcept {
    switch (source) {
        case QuerySource::FromText: return "text";
        case QuerySource::FromDescription: return "description";
        case QuerySource::FromExpansion: return "expansion";
    }
    return "text";
}

std::vector<std::string> QuerySet::texts() const {
    std::vector<std::string> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back(item.text);
    return out;
}

QuerySet build_query_set(std::string_view text, std::string_view description,
                         std::span<const std::string> expansion) {
    QuerySet qs;
    std::unordered_set<std::string> seen;
    auto add = [&](std::string_view raw, QuerySource source) {
        std::string q = utf8::trim(raw);
        if (q.empty() || !seen.insert(q).second) return;
        qs.items.push_back({std::move(q), source});
    };
    add(text, QuerySource::FromText);
    add(description, QuerySource::FromDescription);
    for (const auto& e : expansion) add(e, QuerySource::FromExpansion);
    if (qs.items.empty()) throw EmptyQuerySet();
    return qs;
}

model::ChatRequest expansion_request(std::string_view text, std::string_view description) {
    model::ChatRequest req;
    req.system =
        "You extract retrieval keywords for a knowledge base of Chinese internet slang and cultural references.";
    req.user = "Meme text: " + std::string(text) + "\nImage description: " + std::string(description) +
               "\nList the slang terms, cultural references and concepts a reader needs to understand this meme. "
               "Reply with at most 10 keywords separated by semicolons and nothing else.";
    req.decoding.max_tokens = 128;
    return req;
}

std::vector<std::string> parse_expansion(std::string_view response, std::size_t cap) {
    std::vector<std::string> items;
    std::string current;
    auto flush = [&] {
        std::string item = utf8::trim(current);
        current.clear();
        // Drop list decoration such as "-", "*", "1." or "2)".
        std::size_t cut = 0;
        while (cut < item.size() && (item[cut] == '-' || item[cut] == '*')) ++cut;
        if (cut == 0) {
            std::size_t digits = 0;
            while (digits < item.size() && item[digits] >= '0' && item[digits] <= '9') ++digits;
            if (digits > 0 && digits < item.size() && (item[digits] == '.' || item[digits] == ')')) cut = digits + 1;
        }
        if (cut > 0) item = utf8::trim(std::string_view(item).substr(cut));
        if (!item.empty()) items.push_back(std::move(item));
    };
    for (char32_t cp : utf8::decode(response)) {
        if (cp == U';' || cp == 0xFF1B || cp == U'\n' || cp == U'\r') {
            flush();
        } else {
            utf8::append(current, cp);
        }
    }
    flush();
    if (items.size() > cap) items.resize(cap);
    return items;
}

std::vector<std::string> expand_query(std::string_view text, std::string_view description,
                                      model::ModelBackend& model, std::size_t cap) {
    const auto response = model.chat(expansion_request(text, description));
    auto items = parse_expansion(response.text, cap);
    if (items.empty() && !utf8::trim(response.text).empty()) {
        logger().warn("query expansion response yielded no keywords; continuing without expansion");
    }
    return items;
}

void GateConfig::validate() const {
    if (!std::isfinite(tau_rel) || tau_rel < 0.0 || tau_rel > 1.0) {
        throw InvalidArgument("tau_rel must lie in [0, 1]");
    }
    if (k_final == 0) throw InvalidArgument("k_final must be positive");
    if (k_candidates < k_final) throw InvalidArgument("k_candidates must be at least k_final");
}

std::vector<text::ScoredDoc> retrieve_candidates(const QuerySet& queries, const text::Bm25Index& bm25,
                                                 const text::DenseIndex& dense, model::ModelBackend& embedder,
                                                 const text::HybridWeights& weights, std::size_t k_candidates) {
    text::check_same_documents(bm25, dense);
    const auto texts = queries.texts();
    const auto query_vectors = embedder.embed_texts(texts, dense.dim());
    if (query_vectors.size() != texts.size()) throw ModelError("embedder returned the wrong number of vectors");

    const std::size_t n = bm25.doc_count();
    std::vector<double> lexical(n, 0.0);
    std::vector<double> semantic(n, -1.0);
    for (std::size_t q = 0; q < texts.size(); ++q) {
        const auto tokens = text::tokenize(texts[q]);
        const auto scores = bm25.score_all(tokens);
        for (std::size_t d = 0; d < n; ++d) {
            lexical[d] = q == 0 ? scores[d] : std::max(lexical[d], scores[d]);
            const double c = text::cosine(query_vectors[q], dense.vector_for(bm25.doc_ids()[d]));
            semantic[d] = q == 0 ? c : std::max(semantic[d], c);
        }
    }
    return text::fuse_and_rank(bm25.doc_ids(), lexical, semantic, weights, k_candidates);
}

double relevance_posterior(double l_yes, double l_no) noexcept {
    const double m = std::max(l_yes, l_no);
    const double ey = std::exp(l_yes - m);
    const double en = std::exp(l_no - m);
    return ey / (ey + en);
}

std::string rerank_prompt(std::string_view meme_summary, const kb::KbEntry& doc) {
    std::string p = "Judge whether the document supplies background knowledge that is relevant for interpreting "
                    "the query. Answer with a single word: yes or no.\n";
    p += "Query: ";
    p += meme_summary;
    p += "\nDocument: ";
    p += doc.term;
    p += ": ";
    p += doc.definition;
    p += "\nRelevant:";
    return p;
}

bool relevance_order(const text::ScoredDoc& a, const text::ScoredDoc& b) {
    const double pa = a.p_rel.value_or(0.0);
    const double pb = b.p_rel.value_or(0.0);
    if (pa != pb) return pa > pb;
    return a.doc_id < b.doc_id;
}

std::vector<text::ScoredDoc> rerank(std::vector<text::ScoredDoc> candidates, std::string_view meme_summary,
                                    const text::KnowledgeIndex& index, model::ModelBackend& scorer,
                                    std::size_t parallelism) {
    parallel_for(candidates.size(), parallelism, [&](std::size_t i) {
        auto& c = candidates[i];
        try {
            const auto logits = scorer.yes_no_logits(rerank_prompt(meme_summary, index.entry(c.doc_id)));
            if (!std::isfinite(logits.l_yes) || !std::isfinite(logits.l_no)) {
                throw ModelError("non-finite relevance logits");
            }
            c.p_rel = relevance_posterior(logits.l_yes, logits.l_no);
        } catch (const ModelError& e) {
            logger().warn("rerank failed for '{}': {}; excluding it (p_rel = 0)", c.doc_id, e.what());
            c.p_rel = 0.0;
        }
    });
    std::sort(candidates.begin(), candidates.end(), relevance_order);
    return candidates;
}

std::vector<text::ScoredDoc> gate_candidates(std::span<const text::ScoredDoc> candidates, const GateConfig& config) {
    config.validate();
    std::vector<text::ScoredDoc> kept;
    for (const auto& c : candidates) {
        if (c.p_rel.value_or(0.0) >= config.tau_rel) kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end(), relevance_order);
    if (kept.size() > config.k_final) kept.resize(config.k_final);
    return kept;
}

KnowledgeContext gate(std::span<const text::ScoredDoc> candidates, const GateConfig& config,
                      const text::KnowledgeIndex& index) {
    KnowledgeContext ctx;
    ctx.config.gate = config;
    for (const auto& c : gate_candidates(candidates, config)) {
        ctx.fragments.push_back({index.entry(c.doc_id), c.s_hybrid, c.p_rel.value_or(0.0)});
    }
    return ctx;
}

std::string meme_summary(std::string_view text, std::string_view description) {
    return utf8::trim(utf8::trim(text) + " " + utf8::trim(description));
}

KnowledgeContext run_ake(const MemeInput& meme, const text::KnowledgeIndex& index, Models models,
                         const AkeConfig& config) {
    config.weights.validate();
    config.gate.validate();

    std::vector<std::string> expansion;
    try {
        expansion = expand_query(meme.text, meme.description, models.expander, config.expansion_cap);
    } catch (const ModelError& e) {
        logger().warn("query expansion failed: {}; continuing without expansion", e.what());
    }
    auto queries = build_query_set(meme.text, meme.description, expansion);

    auto candidates = retrieve_candidates(queries, index.bm25, index.dense, models.embedder, config.weights,
                                          config.gate.k_candidates);
    candidates = rerank(std::move(candidates), meme_summary(meme.text, meme.description), index,
                        models.reranker, config.parallelism);

    KnowledgeContext ctx = gate(candidates, config.gate, index);
    ctx.query_set = std::move(queries);
    ctx.config = config;
    return ctx;
}

KnowledgeContext run_ake(const kb::MemeRecord& record, const text::KnowledgeIndex& index, Models models,
                         const AkeConfig& config) {
    return run_ake(MemeInput{record.text, record.description}, index, models, config);
}

}  // namespace memeattr::ake
