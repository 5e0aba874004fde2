#include "memeattr/stats.hpp"

#include <cmath>

namespace memeattr {

std::optional<MeanStd> mean_and_population_std(std::span<const double> values) {
    if (values.empty()) return std::nullopt;
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return MeanStd{mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

}  // namespace memeattr
