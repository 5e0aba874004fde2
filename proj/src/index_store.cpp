#include "memeattr/index_store.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "memeattr/errors.hpp"
#include "memeattr/hybrid.hpp"
#include "memeattr/io.hpp"

namespace memeattr::text {

namespace {

constexpr char kTrailer[4] = {'E', 'N', 'D', '.'};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void raw(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }

    void u32(std::uint32_t v) {
        char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        raw(b, 4);
    }

    void u64(std::uint64_t v) {
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        raw(b, 8);
    }

    void f64(double v) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }

    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    void raw(char* data, std::size_t n) {
        in_.read(data, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) throw IndexFormatError("index file is truncated");
    }

    std::uint32_t u32() {
        unsigned char b[4];
        raw(reinterpret_cast<char*>(b), 4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

    std::uint64_t u64() {
        unsigned char b[8];
        raw(reinterpret_cast<char*>(b), 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

    double f64() {
        const std::uint64_t bits = u64();
        double v = 0.0;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }

    std::string str() {
        const auto n = u32();
        // Guard against absurd lengths from corrupt files before allocating.
        if (n > (1u << 30)) throw IndexFormatError("index string length out of range");
        std::string s(n, '\0');
        raw(s.data(), n);
        return s;
    }

    std::uint32_t count(std::uint32_t limit = 1u << 28) {
        const auto n = u32();
        if (n > limit) throw IndexFormatError("index element count out of range");
        return n;
    }

private:
    std::istream& in_;
};

}  // namespace

const kb::KbEntry& KnowledgeIndex::entry(std::string_view doc_id) const {
    const auto* e = kb.find(doc_id);
    if (e == nullptr) throw UnknownDoc(std::string(doc_id));
    return *e;
}

KnowledgeIndex build_knowledge_index(kb::KnowledgeBase kb, model::ModelBackend& embedder, std::size_t dim,
                                     Bm25Params params, std::size_t batch) {
    KnowledgeIndex index;
    std::vector<Document> docs;
    docs.reserve(kb.size());
    for (const auto& e : kb.entries()) docs.push_back({e.id, e.index_text()});
    index.bm25 = Bm25Index::build(docs, params);
    index.dense = DenseIndex(dim);
    batch = std::max<std::size_t>(batch, 1);
    for (std::size_t start = 0; start < docs.size(); start += batch) {
        const std::size_t end = std::min(docs.size(), start + batch);
        std::vector<std::string> texts;
        for (std::size_t i = start; i < end; ++i) texts.push_back(docs[i].text);
        auto vectors = embedder.embed_texts(texts, dim);
        if (vectors.size() != texts.size()) throw ModelError(embedder.name() + ": wrong number of embedding vectors");
        for (std::size_t i = start; i < end; ++i) index.dense.add(docs[i].id, std::move(vectors[i - start]));
    }
    index.kb = std::move(kb);
    index.embedder = embedder.name();
    return index;
}

void write_index(std::ostream& out, const KnowledgeIndex& index) {
    Writer w(out);
    w.raw(kIndexMagic, 4);
    w.u32(kIndexFormatVersion);
    w.str(index.embedder);

    w.u32(static_cast<std::uint32_t>(index.kb.size()));
    for (const auto& e : index.kb.entries()) w.str(kb::serialize_entry(e));

    const auto& bm = index.bm25;
    w.f64(bm.params().k1);
    w.f64(bm.params().b);
    w.u32(static_cast<std::uint32_t>(bm.doc_count()));
    for (std::size_t i = 0; i < bm.doc_count(); ++i) {
        w.str(bm.doc_ids()[i]);
        w.u32(bm.doc_lengths()[i]);
    }
    w.u32(static_cast<std::uint32_t>(bm.postings().size()));
    for (const auto& [term, list] : bm.postings()) {
        w.str(term);
        w.u32(static_cast<std::uint32_t>(list.size()));
        for (const auto& p : list) {
            w.u32(p.doc);
            w.u32(p.tf);
        }
    }

    const auto& dn = index.dense;
    w.u64(dn.dim());
    w.u32(static_cast<std::uint32_t>(dn.size()));
    for (std::size_t i = 0; i < dn.size(); ++i) {
        w.str(dn.doc_ids()[i]);
        for (double x : dn.vector_at(i)) w.f64(x);
    }
    w.raw(kTrailer, 4);
    if (!out) throw IoError("failed writing index");
}

KnowledgeIndex read_index(std::istream& in) {
    Reader r(in);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kIndexMagic, 4) != 0) throw IndexFormatError("not an index file (bad magic)");
    const auto version = r.u32();
    if (version != kIndexFormatVersion) {
        throw IndexFormatError("unsupported index format version " + std::to_string(version) + " (expected " +
                               std::to_string(kIndexFormatVersion) + ")");
    }

    KnowledgeIndex index;
    index.embedder = r.str();

    std::vector<kb::KbEntry> entries;
    const auto n_entries = r.count();
    entries.reserve(n_entries);
    for (std::uint32_t i = 0; i < n_entries; ++i) entries.push_back(kb::parse_entry(r.str(), i + 1));
    try {
        index.kb = kb::KnowledgeBase(std::move(entries));
    } catch (const DuplicateId& e) {
        throw IndexFormatError(std::string("index knowledge base: ") + e.what());
    }

    Bm25Params params;
    params.k1 = r.f64();
    params.b = r.f64();
    const auto n_docs = r.count();
    std::vector<std::string> ids;
    std::vector<std::uint32_t> lengths;
    for (std::uint32_t i = 0; i < n_docs; ++i) {
        ids.push_back(r.str());
        lengths.push_back(r.u32());
    }
    std::map<std::string, std::vector<Posting>> postings;
    const auto n_terms = r.count();
    for (std::uint32_t t = 0; t < n_terms; ++t) {
        auto term = r.str();
        const auto n_post = r.count(n_docs);
        std::vector<Posting> list(n_post);
        for (auto& p : list) {
            p.doc = r.u32();
            p.tf = r.u32();
        }
        postings.emplace(std::move(term), std::move(list));
    }
    index.bm25 = Bm25Index(params, std::move(ids), std::move(lengths), std::move(postings));

    const auto dim = r.u64();
    if (dim == 0 || dim > (1u << 20)) throw IndexFormatError("dense dimension out of range");
    index.dense = DenseIndex(static_cast<std::size_t>(dim));
    const auto n_vec = r.count();
    for (std::uint32_t i = 0; i < n_vec; ++i) {
        auto id = r.str();
        std::vector<double> v(static_cast<std::size_t>(dim));
        for (double& x : v) x = r.f64();
        try {
            index.dense.add(std::move(id), std::move(v));
        } catch (const Error& e) {
            throw IndexFormatError(std::string("dense vectors: ") + e.what());
        }
    }
    char trailer[4];
    r.raw(trailer, 4);
    if (std::memcmp(trailer, kTrailer, 4) != 0) throw IndexFormatError("index trailer missing");

    if (index.bm25.doc_count() != index.kb.size()) throw IndexFormatError("index document count differs from entry count");
    for (const auto& e : index.kb.entries()) {
        if (!index.bm25.contains(e.id)) throw IndexFormatError("entry '" + e.id + "' missing from lexical index");
    }
    try {
        check_same_documents(index.bm25, index.dense);
    } catch (const IndexMismatch& e) {
        throw IndexFormatError(e.what());
    }
    return index;
}

void save_index(const std::string& path, const KnowledgeIndex& index) {
    std::ostringstream buf(std::ios::binary);
    write_index(buf, index);
    write_file_atomic(path, buf.str());
}

KnowledgeIndex load_index(const std::string& path) {
    std::istringstream in(read_file(path), std::ios::binary);
    return read_index(in);
}

}  // namespace memeattr::text
