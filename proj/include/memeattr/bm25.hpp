#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "memeattr/tokenizer.hpp"

namespace memeattr::text {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    bool operator==(const Bm25Params&) const = default;
};

struct Document {
    std::string id;
    std::string text;
};

struct Posting {
    std::uint32_t doc = 0;  // ordinal into doc_ids()
    std::uint32_t tf = 0;

    bool operator==(const Posting&) const = default;
};

/// Okapi BM25 over an inverted index. IDF is floored at zero so scores are
/// never negative. Immutable after construction.
class Bm25Index {
public:
    Bm25Index() = default;

    /// Tokenizes every document. Throws DuplicateId.
    static Bm25Index build(std::span<const Document> docs, Bm25Params params = {});

    /// Reassembles a persisted index. Throws IndexFormatError when the parts
    /// violate the index invariants.
    Bm25Index(Bm25Params params, std::vector<std::string> doc_ids, std::vector<std::uint32_t> doc_lengths,
              std::map<std::string, std::vector<Posting>> postings);

    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    double avg_doc_len() const noexcept { return avg_doc_len_; }
    const Bm25Params& params() const noexcept { return params_; }
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    const std::vector<std::uint32_t>& doc_lengths() const noexcept { return doc_lengths_; }
    const std::map<std::string, std::vector<Posting>>& postings() const noexcept { return postings_; }

    /// Throws UnknownDoc.
    std::size_t ordinal(std::string_view doc_id) const;
    bool contains(std::string_view doc_id) const;

    /// max(0, ln((N - df + 0.5) / (df + 0.5))); zero for tokens absent from the corpus.
    double idf(std::string_view token) const;

    /// Sum over query tokens (repeats included) of
    /// idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avg_len)). Throws UnknownDoc.
    double score(std::span<const Token> query, std::string_view doc_id) const;

    /// score() for every document, indexed by ordinal. Bitwise equal to
    /// calling score() per document.
    std::vector<double> score_all(std::span<const Token> query) const;

    bool operator==(const Bm25Index& other) const {
        return params_ == other.params_ && doc_ids_ == other.doc_ids_ &&
               doc_lengths_ == other.doc_lengths_ && postings_ == other.postings_;
    }

private:
    double term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len) const;
    void finish();

    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    std::map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::size_t> ordinals_;
    double avg_doc_len_ = 0.0;
};

}  // namespace memeattr::text
