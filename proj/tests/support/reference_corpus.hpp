#pragma once

// Generates a dataset file with the published aggregate counts: 7,042
// records, 3,735 harmful (2,988 train / 747 test) and 3,307 non-harmful.
// Harm types are spread so that each split's types add up to its harmful
// total; the published per-type figures cannot be met because they do not.

#include <array>
#include <ostream>
#include <string>

#include "memeattr/dataset.hpp"

namespace memeattr::testkit {

inline constexpr std::size_t kRefTrainHarmful = 2988;
inline constexpr std::size_t kRefTestHarmful = 747;
inline constexpr std::size_t kRefTrainNonHarmful = 2646;
inline constexpr std::size_t kRefTestNonHarmful = 661;

inline void write_reference_corpus(std::ostream& out) {
    std::size_t n = 0;
    auto emit = [&](kb::Split split, bool harmful, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            kb::MemeRecord r;
            r.id = "ref-" + std::to_string(++n);
            r.text = harmful ? "又输了，你个菜狗" : "今天也是元气满满的一天";
            r.description = "generated record " + std::to_string(n);
            r.label = harmful ? kb::HarmLabel::Harmful : kb::HarmLabel::NonHarmful;
            if (harmful) r.harm_type = kb::kAllHarmTypes[i % 4];
            r.exp_harmful = "有害解读" + std::to_string(n);
            r.exp_nonharmful = "无害解读" + std::to_string(n);
            r.split = split;
            out << kb::serialize_record(r) << '\n';
        }
    };
    emit(kb::Split::Train, true, kRefTrainHarmful);
    emit(kb::Split::Test, true, kRefTestHarmful);
    emit(kb::Split::Train, false, kRefTrainNonHarmful);
    emit(kb::Split::Test, false, kRefTestNonHarmful);
}

}  // namespace memeattr::testkit
