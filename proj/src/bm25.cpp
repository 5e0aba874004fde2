#include "memeattr/bm25.hpp"

#include <algorithm>
#include <cmath>

#include "memeattr/errors.hpp"

namespace memeattr::text {

Bm25Index Bm25Index::build(std::span<const Document> docs, Bm25Params params) {
    Bm25Index index;
    index.params_ = params;
    index.doc_ids_.reserve(docs.size());
    index.doc_lengths_.reserve(docs.size());
    for (std::size_t ord = 0; ord < docs.size(); ++ord) {
        const auto& doc = docs[ord];
        if (!index.ordinals_.emplace(doc.id, ord).second) throw DuplicateId(doc.id);
        index.doc_ids_.push_back(doc.id);

        std::map<std::string, std::uint32_t> tf;
        const auto tokens = tokenize(doc.text);
        for (const auto& t : tokens) ++tf[t.surface];
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        // Ordinals increase monotonically, so every posting list stays sorted.
        for (const auto& [term, count] : tf) {
            index.postings_[term].push_back({static_cast<std::uint32_t>(ord), count});
        }
    }
    index.finish();
    return index;
}

Bm25Index::Bm25Index(Bm25Params params, std::vector<std::string> doc_ids,
                     std::vector<std::uint32_t> doc_lengths, std::map<std::string, std::vector<Posting>> postings)
    : params_(params), doc_ids_(std::move(doc_ids)), doc_lengths_(std::move(doc_lengths)),
      postings_(std::move(postings)) {
    if (doc_ids_.size() != doc_lengths_.size()) {
        throw IndexFormatError("bm25: doc id and length tables differ in size");
    }
    for (std::size_t ord = 0; ord < doc_ids_.size(); ++ord) {
        if (!ordinals_.emplace(doc_ids_[ord], ord).second) throw IndexFormatError("bm25: duplicate doc id");
    }
    for (const auto& [term, list] : postings_) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].doc >= doc_ids_.size() || list[i].tf == 0 ||
                (i > 0 && list[i - 1].doc >= list[i].doc)) {
                throw IndexFormatError("bm25: corrupt posting list for '" + term + "'");
            }
        }
    }
    finish();
}

void Bm25Index::finish() {
    if (doc_lengths_.empty()) {
        avg_doc_len_ = 0.0;
        return;
    }
    double total = 0.0;
    for (auto len : doc_lengths_) total += len;
    avg_doc_len_ = total / static_cast<double>(doc_lengths_.size());
}

std::size_t Bm25Index::ordinal(std::string_view doc_id) const {
    auto it = ordinals_.find(std::string(doc_id));
    if (it == ordinals_.end()) throw UnknownDoc(std::string(doc_id));
    return it->second;
}

bool Bm25Index::contains(std::string_view doc_id) const {
    return ordinals_.count(std::string(doc_id)) > 0;
}

double Bm25Index::idf(std::string_view token) const {
    auto it = postings_.find(std::string(token));
    if (it == postings_.end()) return 0.0;
    const double n = static_cast<double>(doc_ids_.size());
    const double df = static_cast<double>(it->second.size());
    return std::max(0.0, std::log((n - df + 0.5) / (df + 0.5)));
}

double Bm25Index::term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len) const {
    const double f = static_cast<double>(tf);
    // avg_doc_len_ is positive whenever a posting exists.
    const double norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_len) / avg_doc_len_;
    return idf * f * (params_.k1 + 1.0) / (f + params_.k1 * norm);
}

double Bm25Index::score(std::span<const Token> query, std::string_view doc_id) const {
    const auto ord = static_cast<std::uint32_t>(ordinal(doc_id));
    double total = 0.0;
    for (const auto& q : query) {
        auto it = postings_.find(q.surface);
        if (it == postings_.end()) continue;
        const auto& list = it->second;
        auto p = std::lower_bound(list.begin(), list.end(), ord,
                                  [](const Posting& a, std::uint32_t d) { return a.doc < d; });
        if (p == list.end() || p->doc != ord) continue;
        total += term_weight(idf(q.surface), p->tf, doc_lengths_[ord]);
    }
    return total;
}

std::vector<double> Bm25Index::score_all(std::span<const Token> query) const {
    std::vector<double> scores(doc_ids_.size(), 0.0);
    for (const auto& q : query) {
        auto it = postings_.find(q.surface);
        if (it == postings_.end()) continue;
        const double w = idf(q.surface);
        for (const auto& p : it->second) scores[p.doc] += term_weight(w, p.tf, doc_lengths_[p.doc]);
    }
    return scores;
}

}  // namespace memeattr::text
