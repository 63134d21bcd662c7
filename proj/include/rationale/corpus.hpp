#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rationale {

enum class Label { Responsive, Nonresponsive };

std::string to_string(Label label);
Label parse_label(const std::string& s);  // throws on unknown label string

struct Document {
    std::string id;
    std::string text;
    Label label = Label::Nonresponsive;

    bool operator==(const Document&) const = default;
};

// Immutable after construction; safe to share across workers.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> docs);  // validates nonempty, unique ids

    const std::vector<Document>& docs() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }

    std::size_t count_responsive() const;
    std::size_t count_nonresponsive() const;

    std::vector<const Document*> with_label(Label label) const;

    bool operator==(const Corpus&) const = default;

private:
    std::vector<Document> docs_;
};

struct Split {
    Corpus train;
    Corpus test;
    std::uint64_t seed = 0;
};

// One JSON record per line with fields id, text, label.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

// Stratified per-class split, floor(trainFraction * classCount) per class
// into train. Pure function of (corpus, trainFraction, seed); source order
// is preserved within each side.
Split split_corpus(const Corpus& corpus, double trainFraction, std::uint64_t seed);

}  // namespace rationale
