#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memeattr/bm25.hpp"
#include "memeattr/dense.hpp"

namespace memeattr::text {

/// Lexical/dense mixing weights; each in [0, 1], summing to 1.
struct HybridWeights {
    double w_bm25 = 0.5;
    double w_dense = 0.5;

    /// Throws InvalidWeights.
    void validate() const;

    bool operator==(const HybridWeights&) const = default;
};

/// A retrieval candidate with every score the pipeline computes for it.
struct ScoredDoc {
    std::string doc_id;
    double s_bm25 = 0.0;
    double s_dense = 0.0;
    double s_bm25_norm = 0.0;
    double s_dense_norm = 0.0;
    double s_hybrid = 0.0;
    std::optional<double> p_rel;

    bool operator==(const ScoredDoc&) const = default;
};

/// Min-max rescaling over the candidate set, order preserved. A constant set
/// maps to all 1.0 when its value is positive, else all 0.0.
std::vector<double> normalize_scores(std::span<const double> scores);

/// w_bm25 * s_bm25_norm + w_dense * s_dense_norm. Throws InvalidWeights.
double hybrid_score(double s_bm25_norm, double s_dense_norm, const HybridWeights& w);

/// Descending s_hybrid, ties by ascending doc_id.
bool hybrid_order(const ScoredDoc& a, const ScoredDoc& b);

/// Normalizes both raw score families over all candidates, fuses, sorts by
/// hybrid_order and keeps the first `k`. All spans are parallel.
std::vector<ScoredDoc> fuse_and_rank(std::span<const std::string> doc_ids, std::span<const double> bm25,
                                     std::span<const double> dense, const HybridWeights& w, std::size_t k);

/// Scores every document for one query. Throws IndexMismatch when the two
/// indexes cover different documents.
std::vector<ScoredDoc> top_k(const Bm25Index& bm25, const DenseIndex& dense, std::span<const Token> query_tokens,
                             std::span<const double> query_vec, const HybridWeights& w, std::size_t k);

/// Throws IndexMismatch unless both indexes hold the same doc id set.
void check_same_documents(const Bm25Index& bm25, const DenseIndex& dense);

}  // namespace memeattr::text
