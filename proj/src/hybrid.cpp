#include "memeattr/hybrid.hpp"

#include <algorithm>
#include <cmath>

#include "memeattr/errors.hpp"

namespace memeattr::text {

void HybridWeights::validate() const {
    auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!in_unit(w_bm25) || !in_unit(w_dense)) {
        throw InvalidWeights("hybrid weights must lie in [0, 1]");
    }
    if (std::fabs(w_bm25 + w_dense - 1.0) > 1e-9) {
        throw InvalidWeights("hybrid weights must sum to 1");
    }
}

std::vector<double> normalize_scores(std::span<const double> scores) {
    std::vector<double> out(scores.begin(), scores.end());
    if (out.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(out.begin(), out.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi == lo) {
        std::fill(out.begin(), out.end(), hi > 0.0 ? 1.0 : 0.0);
        return out;
    }
    const double range = hi - lo;
    for (double& s : out) s = std::clamp((s - lo) / range, 0.0, 1.0);
    return out;
}

double hybrid_score(double s_bm25_norm, double s_dense_norm, const HybridWeights& w) {
    w.validate();
    return w.w_bm25 * s_bm25_norm + w.w_dense * s_dense_norm;
}

bool hybrid_order(const ScoredDoc& a, const ScoredDoc& b) {
    if (a.s_hybrid != b.s_hybrid) return a.s_hybrid > b.s_hybrid;
    return a.doc_id < b.doc_id;
}

std::vector<ScoredDoc> fuse_and_rank(std::span<const std::string> doc_ids, std::span<const double> bm25,
                                     std::span<const double> dense, const HybridWeights& w, std::size_t k) {
    w.validate();
    if (k == 0) throw InvalidArgument("k must be positive");
    if (bm25.size() != doc_ids.size() || dense.size() != doc_ids.size()) {
        throw InvalidArgument("fuse_and_rank: score tables are not parallel to the doc ids");
    }
    const auto bm25_norm = normalize_scores(bm25);
    const auto dense_norm = normalize_scores(dense);

    std::vector<ScoredDoc> docs;
    docs.reserve(doc_ids.size());
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
        ScoredDoc d;
        d.doc_id = doc_ids[i];
        d.s_bm25 = bm25[i];
        d.s_dense = dense[i];
        d.s_bm25_norm = bm25_norm[i];
        d.s_dense_norm = dense_norm[i];
        d.s_hybrid = hybrid_score(d.s_bm25_norm, d.s_dense_norm, w);
        docs.push_back(std::move(d));
    }
    const std::size_t keep = std::min(k, docs.size());
    std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(keep), docs.end(), hybrid_order);
    docs.resize(keep);
    return docs;
}

void check_same_documents(const Bm25Index& bm25, const DenseIndex& dense) {
    if (bm25.doc_count() != dense.size()) {
        throw IndexMismatch("lexical index has " + std::to_string(bm25.doc_count()) +
                            " documents, dense index has " + std::to_string(dense.size()));
    }
    for (const auto& id : bm25.doc_ids()) {
        if (!dense.contains(id)) throw IndexMismatch("document '" + id + "' missing from dense index");
    }
}

std::vector<ScoredDoc> top_k(const Bm25Index& bm25, const DenseIndex& dense, std::span<const Token> query_tokens,
                             std::span<const double> query_vec, const HybridWeights& w, std::size_t k) {
    check_same_documents(bm25, dense);
    const auto lexical = bm25.score_all(query_tokens);
    std::vector<double> semantic;
    semantic.reserve(bm25.doc_count());
    for (const auto& id : bm25.doc_ids()) semantic.push_back(cosine(query_vec, dense.vector_for(id)));
    return fuse_and_rank(bm25.doc_ids(), lexical, semantic, w, k);
}

}  // namespace memeattr::text
