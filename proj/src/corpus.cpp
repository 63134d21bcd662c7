#include "rationale/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "rationale/detail/rng.hpp"

namespace rationale {

std::string to_string(Label label) {
    return label == Label::Responsive ? "responsive" : "nonresponsive";
}

Label parse_label(const std::string& s) {
    if (s == "responsive") return Label::Responsive;
    if (s == "nonresponsive") return Label::Nonresponsive;
    throw std::runtime_error("unknown label \"" + s +
                             "\" (expected \"responsive\" or \"nonresponsive\")");
}

Corpus::Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
    std::unordered_set<std::string> seen;
    seen.reserve(docs_.size());
    for (const auto& d : docs_) {
        if (d.id.empty()) throw std::runtime_error("document with empty id");
        if (!seen.insert(d.id).second)
            throw std::runtime_error("duplicate document id \"" + d.id + "\"");
    }
}

std::size_t Corpus::count_responsive() const {
    return static_cast<std::size_t>(std::count_if(
        docs_.begin(), docs_.end(),
        [](const Document& d) { return d.label == Label::Responsive; }));
}

std::size_t Corpus::count_nonresponsive() const {
    return docs_.size() - count_responsive();
}

std::vector<const Document*> Corpus::with_label(Label label) const {
    std::vector<const Document*> out;
    for (const auto& d : docs_)
        if (d.label == label) out.push_back(&d);
    return out;
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);

    std::vector<Document> docs;
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
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("text") ||
            !rec.contains("label") || !rec["id"].is_string() ||
            !rec["text"].is_string() || !rec["label"].is_string()) {
            throw std::runtime_error(path + ":" + std::to_string(lineNo) +
                                     ": record must have string fields id, text, label");
        }
        Document d;
        d.id = rec["id"].get<std::string>();
        d.text = rec["text"].get<std::string>();
        try {
            d.label = parse_label(rec["label"].get<std::string>());
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineNo) + ": " + e.what());
        }
        docs.push_back(std::move(d));
    }
    try {
        return Corpus(std::move(docs));
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& d : corpus.docs()) {
        nlohmann::json rec{{"id", d.id}, {"text", d.text}, {"label", to_string(d.label)}};
        out << rec.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Split split_corpus(const Corpus& corpus, double trainFraction, std::uint64_t seed) {
    if (!(trainFraction > 0.0 && trainFraction < 1.0))
        throw std::invalid_argument("train fraction must lie in (0, 1)");
    const std::size_t nResp = corpus.count_responsive();
    const std::size_t nNonresp = corpus.count_nonresponsive();
    if (nResp < 2 || nNonresp < 2)
        throw std::invalid_argument("each class needs at least 2 documents to split");

    // Shuffle indices per class, then keep source order inside each side.
    std::vector<char> inTrain(corpus.size(), 0);
    std::mt19937_64 rng(detail::mix64(seed, 0x53504c49u));
    for (const Label label : {Label::Responsive, Label::Nonresponsive}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < corpus.size(); ++i)
            if (corpus.docs()[i].label == label) idx.push_back(i);
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
            const std::size_t j = i + detail::bounded(rng, idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        const auto take = static_cast<std::size_t>(
            static_cast<double>(idx.size()) * trainFraction);
        for (std::size_t i = 0; i < take; ++i) inTrain[idx[i]] = 1;
    }

    std::vector<Document> train, test;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        (inTrain[i] ? train : test).push_back(corpus.docs()[i]);
    return Split{Corpus(std::move(train)), Corpus(std::move(test)), seed};
}

}  // namespace rationale
