#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rationale/corpus.hpp"
#include "rationale/snippets.hpp"

namespace rationale {

// Synthetic corpora with planted responsive passages. Three disjoint word
// families: topic words (the rationale signal, confined to plants of
// responsive documents), ambient words (diffuse responsive-adjacent language
// sprinkled through whole documents, more often in responsive ones), and
// neutral background. topicInNonresp > 0 bleeds topic words into
// nonresponsive text as a stress mode.
struct GenConfig {
    std::size_t nResp = 200;
    std::size_t nNonresp = 600;
    std::size_t docLenMin = 160;
    std::size_t docLenMax = 260;
    std::size_t plantLength = 50;
    int plantsPerRespDoc = 3;  // 1..3
    std::size_t backgroundVocab = 1500;
    std::size_t topicVocab = 2500;
    std::size_t ambientVocab = 300;
    double signalStrength = 0.55;  // (0,1]: topic-word density inside plants
    double ambientInResp = 0.08;   // ambient rate outside the topic draws
    double ambientInNonresp = 0.03;
    double topicInNonresp = 0.0;
    // Fraction of nonresponsive-labeled documents that nevertheless carry a
    // responsive plant: review labels are never perfect, and missed
    // responsive text is the dominant real-world label defect. Such plants
    // are contamination, not rationale: they get no ground-truth spans.
    double mislabeledNonresp = 0.25;
    std::uint64_t seed = 0;
    std::string idPrefix;
};

struct PlantSpan {
    std::size_t start = 0;
    std::size_t length = 0;

    bool operator==(const PlantSpan&) const = default;
};

struct GroundTruth {
    std::map<std::string, std::vector<PlantSpan>> spans;  // docId -> plants
};

std::pair<Corpus, GroundTruth> generate(const GenConfig& cfg);

void save_ground_truth(const GroundTruth& truth, const std::string& path);
GroundTruth load_ground_truth(const std::string& path);

// Fraction of this document's planted spans covered >= 50% by one of the
// top-K ranked snippets.
double rationale_recall(std::span<const ScoredSnippet> ranked,
                        std::span<const PlantSpan> truth, std::size_t topK);

// Lookup form; throws when the document has no ground-truth entry.
double rationale_recall(std::span<const ScoredSnippet> ranked,
                        const GroundTruth& truth, const std::string& docId,
                        std::size_t topK);

}  // namespace rationale
