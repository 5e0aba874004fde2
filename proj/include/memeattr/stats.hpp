#pragma once

#include <optional>
#include <span>

namespace memeattr {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population
};

/// Mean and population standard deviation; absent for empty input.
std::optional<MeanStd> mean_and_population_std(std::span<const double> values);

}  // namespace memeattr
