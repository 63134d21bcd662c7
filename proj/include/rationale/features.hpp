#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rationale/tokenize.hpp"

namespace rationale {

// Selected n-gram vocabulary. Column order is the selection order
// (descending information gain, ties lexicographic). Immutable once built.
struct FeatureSpace {
    std::vector<std::string> features;
    std::unordered_map<std::string, std::int32_t> index;
    int ngramMax = 3;

    std::size_t size() const { return features.size(); }
    bool operator==(const FeatureSpace& o) const {
        return features == o.features && ngramMax == o.ngramMax;
    }
};

FeatureSpace make_feature_space(std::vector<std::string> features, int ngramMax);

// Sparse normalized-frequency vector; entries sorted by column.
struct FeatureVector {
    std::vector<std::pair<std::int32_t, double>> entries;
    std::size_t sourceLength = 0;
};

// Multiset of all contiguous 1..ngramMax grams, words joined by "_".
struct GramCounts {
    std::unordered_map<std::string, std::uint32_t> counts;
    std::uint64_t total = 0;  // count of gram instances, duplicates included
};

GramCounts extract_ngrams(std::span<const std::string> tokens, int ngramMax);

// Binary-class information gain of a feature's presence, in bits.
// IG = H(class) - [P(present) H(class|present) + P(absent) H(class|absent)]
double information_gain(std::int64_t presentPos, std::int64_t presentNeg,
                        std::int64_t totalPos, std::int64_t totalNeg);

// Ranks candidate n-grams by IG over per-unit presence and keeps the top k
// (all candidates when fewer exist). Candidates seen in fewer than
// 2 training units are dropped before ranking.
FeatureSpace select_top_k(std::span<const TokenSeq> positives,
                          std::span<const TokenSeq> negatives,
                          std::size_t k, int ngramMax);

// value(f) = count(f) / total gram count of the unit; absent features omitted.
FeatureVector vectorize(std::span<const std::string> tokens, const FeatureSpace& space);
FeatureVector vectorize(const TokenSeq& seq, const FeatureSpace& space);

}  // namespace rationale
