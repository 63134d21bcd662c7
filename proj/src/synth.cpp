#include "rationale/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "rationale/detail/rng.hpp"

namespace rationale {

namespace {

void validate(const GenConfig& cfg) {
    if (cfg.docLenMin < 1 || cfg.docLenMax < cfg.docLenMin)
        throw std::invalid_argument("document length range is empty");
    if (cfg.plantLength < 1) throw std::invalid_argument("plant length must be >= 1");
    if (cfg.plantsPerRespDoc < 1 || cfg.plantsPerRespDoc > 3)
        throw std::invalid_argument("plantsPerRespDoc must be 1..3");
    if (cfg.plantLength * static_cast<std::size_t>(cfg.plantsPerRespDoc) > cfg.docLenMin)
        throw std::invalid_argument("plants do not fit in the shortest document");
    if (!(cfg.signalStrength > 0.0 && cfg.signalStrength <= 1.0))
        throw std::invalid_argument("signalStrength must lie in (0, 1]");
    if (cfg.topicInNonresp < 0.0 || cfg.topicInNonresp >= 1.0)
        throw std::invalid_argument("topicInNonresp must lie in [0, 1)");
    if (cfg.ambientInResp < 0.0 || cfg.ambientInResp >= 1.0 ||
        cfg.ambientInNonresp < 0.0 || cfg.ambientInNonresp >= 1.0)
        throw std::invalid_argument("ambient rates must lie in [0, 1)");
    if (cfg.mislabeledNonresp < 0.0 || cfg.mislabeledNonresp >= 1.0)
        throw std::invalid_argument("mislabeledNonresp must lie in [0, 1)");
    if (cfg.backgroundVocab < 1 || cfg.topicVocab < 1 || cfg.ambientVocab < 1)
        throw std::invalid_argument("vocabulary sizes must be >= 1");
}

std::string doc_id(const GenConfig& cfg, char kind, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%c%06zu", kind, i);
    return cfg.idPrefix + buf;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    std::size_t bytes = 0;
    for (const auto& t : tokens) bytes += t.size() + 1;
    out.reserve(bytes);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i];
    }
    return out;
}

}  // namespace

std::pair<Corpus, GroundTruth> generate(const GenConfig& cfg) {
    validate(cfg);

    // Vocabulary words are fixed by index, not by seed, so corpora generated
    // with different seeds share one vocabulary.
    const auto bgWord = [](std::size_t i) { return "bg" + std::to_string(i); };
    const auto tpWord = [](std::size_t i) { return "tp" + std::to_string(i); };
    const auto amWord = [](std::size_t i) { return "am" + std::to_string(i); };

    // One plant per equal segment keeps plants disjoint without rejection.
    //
    // Responsive documents draw one strength per document from [s^3,
    // s(1-0.4(1-s))] (collapses to 1 at signalStrength 1) with a small
    // per-plant jitter: passages are strong or weak together, the way
    // review strength varies doc to doc.
    const auto lay_plants = [&](std::mt19937_64& rng, std::vector<std::string>& tokens,
                                std::size_t nPlants) {
        const double s = cfg.signalStrength;
        const double lo = s * s * s;
        const double respHi = s * (1.0 - 0.4 * (1.0 - s));
        const double docDensity =
            lo + (std::max(respHi, lo) - lo) * detail::unit_real(rng);

        const std::size_t segment = tokens.size() / nPlants;
        std::vector<PlantSpan> spans;
        for (std::size_t p = 0; p < nPlants; ++p) {
            const std::size_t segStart = p * segment;
            const std::size_t slack = segment - cfg.plantLength;
            const std::size_t start = segStart + detail::bounded(rng, slack + 1);
            spans.push_back({start, cfg.plantLength});

            // jitter shrinks toward the band floor, so signal 1.0 stays exact
            const double density =
                docDensity - 0.2 * detail::unit_real(rng) * (docDensity - lo);
            std::size_t topicCount = 0;
            for (std::size_t i = start; i < start + cfg.plantLength; ++i) {
                if (detail::unit_real(rng) < density) {
                    tokens[i] = tpWord(detail::bounded(rng, cfg.topicVocab));
                    ++topicCount;
                }
            }
            if (topicCount == 0)  // a plant must carry at least one topic word
                tokens[start + cfg.plantLength / 2] =
                    tpWord(detail::bounded(rng, cfg.topicVocab));
        }
        return spans;
    };

    const auto base_tokens = [&](std::mt19937_64& rng, double ambientRate) {
        const std::size_t len =
            cfg.docLenMin + detail::bounded(rng, cfg.docLenMax - cfg.docLenMin + 1);
        std::vector<std::string> tokens(len);
        for (auto& t : tokens) {
            const bool ambient = detail::unit_real(rng) < ambientRate;
            t = ambient ? amWord(detail::bounded(rng, cfg.ambientVocab))
                        : bgWord(detail::bounded(rng, cfg.backgroundVocab));
        }
        return tokens;
    };

    std::vector<Document> docs;
    docs.reserve(cfg.nResp + cfg.nNonresp);
    GroundTruth truth;

    for (std::size_t d = 0; d < cfg.nResp; ++d) {
        std::mt19937_64 rng(detail::mix64(detail::mix64(cfg.seed, 0x52), d));
        auto tokens = base_tokens(rng, cfg.ambientInResp);
        auto spans = lay_plants(rng, tokens, static_cast<std::size_t>(cfg.plantsPerRespDoc));

        Document doc;
        doc.id = doc_id(cfg, 'r', d);
        doc.text = join(tokens);
        doc.label = Label::Responsive;
        truth.spans[doc.id] = std::move(spans);
        docs.push_back(std::move(doc));
    }

    for (std::size_t d = 0; d < cfg.nNonresp; ++d) {
        std::mt19937_64 rng(detail::mix64(detail::mix64(cfg.seed, 0x4e), d));
        const bool mislabeled = detail::unit_real(rng) < cfg.mislabeledNonresp;
        std::vector<std::string> tokens;
        if (mislabeled) {
            // missed responsive material discussed in passing: topic words
            // sprinkled thinly through the whole document, never dense enough
            // to form a passage, so no ground-truth spans. Doc-level topic
            // mass overlaps the weaker responsive documents.
            tokens = base_tokens(rng, cfg.ambientInResp);
            const double rate =
                cfg.signalStrength * (0.1 + 0.1 * detail::unit_real(rng));
            for (auto& t : tokens)
                if (detail::unit_real(rng) < rate)
                    t = tpWord(detail::bounded(rng, cfg.topicVocab));
        } else {
            tokens = base_tokens(rng, cfg.ambientInNonresp);
            if (cfg.topicInNonresp > 0.0)
                for (auto& t : tokens)
                    if (detail::unit_real(rng) < cfg.topicInNonresp)
                        t = tpWord(detail::bounded(rng, cfg.topicVocab));
        }
        Document doc;
        doc.id = doc_id(cfg, 'n', d);
        doc.text = join(tokens);
        doc.label = Label::Nonresponsive;
        docs.push_back(std::move(doc));
    }

    return {Corpus(std::move(docs)), std::move(truth)};
}

void save_ground_truth(const GroundTruth& truth, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write ground truth file: " + path);
    for (const auto& [docId, spans] : truth.spans) {
        for (const auto& s : spans) {
            nlohmann::json rec{{"doc", docId}, {"start", s.start}, {"length", s.length}};
            out << rec.dump() << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ground truth file: " + path);
    GroundTruth truth;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineNo) +
                                     ": malformed record: " + e.what());
        }
        truth.spans[rec.at("doc").get<std::string>()].push_back(
            {rec.at("start").get<std::size_t>(), rec.at("length").get<std::size_t>()});
    }
    return truth;
}

double rationale_recall(std::span<const ScoredSnippet> ranked,
                        std::span<const PlantSpan> truth, std::size_t topK) {
    if (truth.empty())
        throw std::invalid_argument("rationale recall needs at least one planted span");
    if (topK == 0 || ranked.empty()) return 0.0;

    const std::size_t top = std::min(topK, ranked.size());
    std::size_t hits = 0;
    for (const auto& span : truth) {
        const std::size_t spanEnd = span.start + span.length;
        bool hit = false;
        for (std::size_t i = 0; i < top && !hit; ++i) {
            const auto& s = ranked[i].snippet;
            const std::size_t lo = std::max(span.start, s.start);
            const std::size_t hi = std::min(spanEnd, s.end());
            const std::size_t overlap = hi > lo ? hi - lo : 0;
            hit = 2 * overlap >= span.length;
        }
        if (hit) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double rationale_recall(std::span<const ScoredSnippet> ranked, const GroundTruth& truth,
                        const std::string& docId, std::size_t topK) {
    const auto it = truth.spans.find(docId);
    if (it == truth.spans.end())
        throw std::invalid_argument("document " + docId + " has no ground-truth spans");
    return rationale_recall(ranked, it->second, topK);
}

}  // namespace rationale
