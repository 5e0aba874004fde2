#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memeattr/dataset.hpp"
#include "memeattr/gateway.hpp"
#include "memeattr/hybrid.hpp"
#include "memeattr/index_store.hpp"
#include "memeattr/kb.hpp"

namespace memeattr::ake {

inline constexpr std::size_t kDefaultExpansionCap = 10;

// ---------------------------------------------------------------------------
// Query set

enum class QuerySource { FromText, FromDescription, FromExpansion };

std::string_view to_string(QuerySource source) noexcept;

struct QueryItem {
    std::string text;
    QuerySource source = QuerySource::FromText;

    bool operator==(const QueryItem&) const = default;
};

/// Ordered set of non-empty, distinct queries.
struct QuerySet {
    std::vector<QueryItem> items;

    std::vector<std::string> texts() const;
    bool operator==(const QuerySet&) const = default;
};

/// Union of the meme text, the image description and the expansion terms.
/// Strings are trimmed; empty ones are dropped; on duplicates the first
/// occurrence (text, then description, then expansion order) wins.
/// Throws EmptyQuerySet when nothing survives.
QuerySet build_query_set(std::string_view text, std::string_view description,
                         std::span<const std::string> expansion);

// ---------------------------------------------------------------------------
// Query expansion

/// Prompt asking a small model for semicolon-separated keywords.
model::ChatRequest expansion_request(std::string_view text, std::string_view description);

/// Splits a model response on semicolons and newlines (ASCII or fullwidth),
/// strips list bullets, drops empty items and keeps at most `cap`.
std::vector<std::string> parse_expansion(std::string_view response, std::size_t cap = kDefaultExpansionCap);

/// Asks `model` for keywords describing the meme. ModelError propagates; a
/// response that yields no usable item gives an empty list and a warning.
std::vector<std::string> expand_query(std::string_view text, std::string_view description,
                                      model::ModelBackend& model, std::size_t cap = kDefaultExpansionCap);

// ---------------------------------------------------------------------------
// Retrieval, rerank, gate

struct GateConfig {
    double tau_rel = 0.5;
    std::size_t k_final = 5;
    std::size_t k_candidates = 20;

    /// Throws InvalidArgument.
    void validate() const;

    bool operator==(const GateConfig&) const = default;
};

struct AkeConfig {
    text::HybridWeights weights;
    GateConfig gate;
    std::size_t expansion_cap = kDefaultExpansionCap;
    std::size_t parallelism = 4;

    bool operator==(const AkeConfig&) const = default;
};

/// Per document: the best BM25 and the best cosine over all queries, then
/// normalization, fusion and ranking as in text::top_k.
std::vector<text::ScoredDoc> retrieve_candidates(const QuerySet& queries, const text::Bm25Index& bm25,
                                                 const text::DenseIndex& dense, model::ModelBackend& embedder,
                                                 const text::HybridWeights& weights, std::size_t k_candidates);

/// exp(l_yes) / (exp(l_yes) + exp(l_no)), evaluated without overflow.
double relevance_posterior(double l_yes, double l_no) noexcept;

/// Yes/no relevance prompt for one document against the meme summary.
std::string rerank_prompt(std::string_view meme_summary, const kb::KbEntry& doc);

/// Fills p_rel for every candidate and re-sorts by descending p_rel (ties by
/// ascending doc_id). A failed or non-finite model call sets p_rel to 0.
std::vector<text::ScoredDoc> rerank(std::vector<text::ScoredDoc> candidates, std::string_view meme_summary,
                                    const text::KnowledgeIndex& index, model::ModelBackend& scorer,
                                    std::size_t parallelism = 1);

/// Descending p_rel, ties by ascending doc_id.
bool relevance_order(const text::ScoredDoc& a, const text::ScoredDoc& b);

struct Fragment {
    kb::KbEntry entry;
    double s_hybrid = 0.0;
    double p_rel = 0.0;

    bool operator==(const Fragment&) const = default;
};

/// Gated background knowledge for one meme.
struct KnowledgeContext {
    std::vector<Fragment> fragments;
    QuerySet query_set;
    AkeConfig config;

    bool operator==(const KnowledgeContext&) const = default;
};

/// Keeps candidates with p_rel >= tau_rel, best first, at most k_final.
/// Candidates without p_rel count as 0.
std::vector<text::ScoredDoc> gate_candidates(std::span<const text::ScoredDoc> candidates, const GateConfig& config);

KnowledgeContext gate(std::span<const text::ScoredDoc> candidates, const GateConfig& config,
                      const text::KnowledgeIndex& index);

// ---------------------------------------------------------------------------
// Full stage

struct Models {
    model::ModelBackend& expander;
    model::ModelBackend& embedder;
    model::ModelBackend& reranker;
};

struct MemeInput {
    std::string text;
    std::string description;
};

/// Text and description joined by a space, trimmed. Used as the rerank query.
std::string meme_summary(std::string_view text, std::string_view description);

/// expand -> query set -> hybrid candidates -> rerank -> gate.
/// Expansion failures degrade to no expansion; EmptyQuerySet propagates.
KnowledgeContext run_ake(const MemeInput& meme, const text::KnowledgeIndex& index, Models models,
                         const AkeConfig& config);

KnowledgeContext run_ake(const kb::MemeRecord& record, const text::KnowledgeIndex& index, Models models,
                         const AkeConfig& config);

}  // namespace memeattr::ake
