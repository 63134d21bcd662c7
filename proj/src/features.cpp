#include "rationale/features.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_set>

namespace rationale {

namespace {

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Binary entropy of a (pos, neg) count pair.
double class_entropy(double pos, double neg) {
    const double n = pos + neg;
    if (n <= 0.0) return 0.0;
    return -plogp(pos / n) - plogp(neg / n);
}

void append_grams(std::span<const std::string> tokens, int ngramMax,
                  const std::function<void(std::string&&)>& sink) {
    const std::size_t len = tokens.size();
    for (std::size_t i = 0; i < len; ++i) {
        std::string gram = tokens[i];
        sink(std::string(gram));
        for (int n = 2; n <= ngramMax; ++n) {
            const std::size_t j = i + static_cast<std::size_t>(n) - 1;
            if (j >= len) break;
            gram += '_';
            gram += tokens[j];
            sink(std::string(gram));
        }
    }
}

}  // namespace

FeatureSpace make_feature_space(std::vector<std::string> features, int ngramMax) {
    FeatureSpace space;
    space.ngramMax = ngramMax;
    space.features = std::move(features);
    space.index.reserve(space.features.size());
    for (std::size_t i = 0; i < space.features.size(); ++i) {
        if (!space.index.emplace(space.features[i], static_cast<std::int32_t>(i)).second)
            throw std::invalid_argument("duplicate feature \"" + space.features[i] + "\"");
    }
    return space;
}

GramCounts extract_ngrams(std::span<const std::string> tokens, int ngramMax) {
    if (ngramMax < 1 || ngramMax > 3)
        throw std::invalid_argument("ngramMax must be between 1 and 3");
    GramCounts out;
    out.counts.reserve(tokens.size() * static_cast<std::size_t>(ngramMax));
    append_grams(tokens, ngramMax, [&](std::string&& gram) {
        ++out.counts[std::move(gram)];
        ++out.total;
    });
    return out;
}

double information_gain(std::int64_t presentPos, std::int64_t presentNeg,
                        std::int64_t totalPos, std::int64_t totalNeg) {
    if (presentPos < 0 || presentNeg < 0 || totalPos < 0 || totalNeg < 0)
        throw std::invalid_argument("information gain counts must be nonnegative");
    if (presentPos > totalPos || presentNeg > totalNeg)
        throw std::invalid_argument("present counts cannot exceed class totals");
    const double total = static_cast<double>(totalPos + totalNeg);
    if (total < 1.0) throw std::invalid_argument("at least one training unit required");

    const double present = static_cast<double>(presentPos + presentNeg);
    const double absentPos = static_cast<double>(totalPos - presentPos);
    const double absentNeg = static_cast<double>(totalNeg - presentNeg);

    const double h = class_entropy(static_cast<double>(totalPos),
                                   static_cast<double>(totalNeg));
    const double hPresent = class_entropy(static_cast<double>(presentPos),
                                          static_cast<double>(presentNeg));
    const double hAbsent = class_entropy(absentPos, absentNeg);
    const double ig = h - (present / total) * hPresent -
                      ((total - present) / total) * hAbsent;
    return std::max(0.0, ig);  // clamp the odd -1e-17 rounding residue
}

FeatureSpace select_top_k(std::span<const TokenSeq> positives,
                          std::span<const TokenSeq> negatives,
                          std::size_t k, int ngramMax) {
    if (k == 0) throw std::invalid_argument("feature count k must be positive");
    std::int64_t totalPos = 0, totalNeg = 0;

    struct Presence {
        std::int32_t pos = 0;
        std::int32_t neg = 0;
    };
    std::unordered_map<std::string, Presence> presence;

    std::unordered_set<std::string> seen;
    const auto accumulate = [&](std::span<const TokenSeq> units, bool positive) {
        for (const auto& unit : units) {
            if (unit.empty()) continue;
            positive ? ++totalPos : ++totalNeg;
            seen.clear();
            append_grams(unit.tokens, ngramMax, [&](std::string&& gram) {
                if (seen.insert(gram).second) {
                    auto& p = presence[std::move(gram)];
                    positive ? ++p.pos : ++p.neg;
                }
            });
        }
    };
    accumulate(positives, true);
    accumulate(negatives, false);

    if (totalPos == 0 || totalNeg == 0)
        throw std::invalid_argument("feature selection needs units of both classes");

    struct Ranked {
        double ig;
        const std::string* gram;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(presence.size());
    for (const auto& [gram, p] : presence) {
        if (p.pos + p.neg < 2) continue;  // singletons have unstable IG
        ranked.push_back({information_gain(p.pos, p.neg, totalPos, totalNeg), &gram});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.ig != b.ig) return a.ig > b.ig;
        return *a.gram < *b.gram;
    });
    if (ranked.size() > k) ranked.resize(k);

    std::vector<std::string> features;
    features.reserve(ranked.size());
    for (const auto& r : ranked) features.push_back(*r.gram);
    return make_feature_space(std::move(features), ngramMax);
}

FeatureVector vectorize(std::span<const std::string> tokens, const FeatureSpace& space) {
    if (space.size() == 0) throw std::invalid_argument("empty feature space");
    FeatureVector v;
    v.sourceLength = tokens.size();
    if (tokens.empty()) return v;

    const GramCounts grams = extract_ngrams(tokens, space.ngramMax);
    v.entries.reserve(16);
    for (const auto& [gram, count] : grams.counts) {
        const auto it = space.index.find(gram);
        if (it == space.index.end()) continue;
        v.entries.emplace_back(it->second,
                               static_cast<double>(count) / static_cast<double>(grams.total));
    }
    std::sort(v.entries.begin(), v.entries.end());
    return v;
}

FeatureVector vectorize(const TokenSeq& seq, const FeatureSpace& space) {
    return vectorize(std::span<const std::string>(seq.tokens), space);
}

}  // namespace rationale
