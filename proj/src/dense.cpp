#include "memeattr/dense.hpp"

#include <cmath>

#include "memeattr/errors.hpp"

namespace memeattr::text {

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("cosine: lengths " + std::to_string(a.size()) + " and " +
                                std::to_string(b.size()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ZeroVector();
    const double c = dot / (std::sqrt(na) * std::sqrt(nb));
    // Rounding can push |c| a hair past 1.
    return std::fmax(-1.0, std::fmin(1.0, c));
}

DenseIndex::DenseIndex(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("dense index dimension must be positive");
}

void DenseIndex::add(std::string doc_id, std::vector<double> vec) {
    if (vec.size() != dim_) {
        throw DimensionMismatch("vector for '" + doc_id + "' has length " + std::to_string(vec.size()) +
                                ", index dimension is " + std::to_string(dim_));
    }
    bool nonzero = false;
    for (double v : vec) {
        if (!std::isfinite(v)) throw InvalidArgument("vector for '" + doc_id + "' is not finite");
        nonzero = nonzero || v != 0.0;
    }
    if (!nonzero) throw ZeroVector();
    if (!ordinals_.emplace(doc_id, ids_.size()).second) throw DuplicateId(doc_id);
    ids_.push_back(std::move(doc_id));
    vectors_.push_back(std::move(vec));
}

const std::vector<double>& DenseIndex::vector_for(std::string_view doc_id) const {
    auto it = ordinals_.find(std::string(doc_id));
    if (it == ordinals_.end()) throw UnknownDoc(std::string(doc_id));
    return vectors_[it->second];
}

bool DenseIndex::contains(std::string_view doc_id) const {
    return ordinals_.count(std::string(doc_id)) > 0;
}

std::vector<double> DenseIndex::similarity_all(std::span<const double> query) const {
    std::vector<double> out;
    out.reserve(vectors_.size());
    for (const auto& v : vectors_) out.push_back(cosine(query, v));
    return out;
}

}  // namespace memeattr::text
