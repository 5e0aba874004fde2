#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "memeattr/bm25.hpp"
#include "memeattr/dense.hpp"
#include "memeattr/gateway.hpp"
#include "memeattr/kb.hpp"

namespace memeattr::text {

inline constexpr char kIndexMagic[4] = {'M', 'A', 'K', 'I'};
inline constexpr std::uint32_t kIndexFormatVersion = 1;
inline constexpr std::size_t kDefaultEmbeddingDim = 256;

/// Everything retrieval needs: the entries themselves plus both indexes built
/// over KbEntry::index_text(), keyed by entry id.
struct KnowledgeIndex {
    kb::KnowledgeBase kb;
    Bm25Index bm25;
    DenseIndex dense;
    std::string embedder;  // backend name that produced the vectors

    /// Throws UnknownDoc.
    const kb::KbEntry& entry(std::string_view doc_id) const;

    bool operator==(const KnowledgeIndex&) const = default;
};

/// Indexes every entry. Embeddings are requested in batches of `batch` texts.
KnowledgeIndex build_knowledge_index(kb::KnowledgeBase kb, model::ModelBackend& embedder, std::size_t dim,
                                     Bm25Params params = {}, std::size_t batch = 64);

/// Single-file container: 4-byte magic, u32 format version, then the entries,
/// postings and vectors. All integers and doubles little-endian.
void write_index(std::ostream& out, const KnowledgeIndex& index);

/// Throws IndexFormatError on bad magic, unknown version, truncation or
/// inconsistent contents.
KnowledgeIndex read_index(std::istream& in);

/// Written through a temporary file and renamed into place.
void save_index(const std::string& path, const KnowledgeIndex& index);
KnowledgeIndex load_index(const std::string& path);

}  // namespace memeattr::text
