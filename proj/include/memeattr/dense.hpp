#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace memeattr::text {

/// dot(a, b) / (|a| |b|). Throws DimensionMismatch, ZeroVector.
double cosine(std::span<const double> a, std::span<const double> b);

/// Flat store of fixed-dimension document vectors; exact cosine search.
class DenseIndex {
public:
    DenseIndex() = default;
    explicit DenseIndex(std::size_t dim);

    /// Throws DimensionMismatch, ZeroVector, DuplicateId.
    void add(std::string doc_id, std::vector<double> vec);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& doc_ids() const noexcept { return ids_; }
    const std::vector<double>& vector_at(std::size_t ordinal) const { return vectors_.at(ordinal); }

    /// Throws UnknownDoc.
    const std::vector<double>& vector_for(std::string_view doc_id) const;
    bool contains(std::string_view doc_id) const;

    /// Cosine of `query` against every stored vector, in insertion order.
    std::vector<double> similarity_all(std::span<const double> query) const;

    bool operator==(const DenseIndex& other) const {
        return dim_ == other.dim_ && ids_ == other.ids_ && vectors_ == other.vectors_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> ids_;
    std::vector<std::vector<double>> vectors_;
    std::unordered_map<std::string, std::size_t> ordinals_;
};

}  // namespace memeattr::text
