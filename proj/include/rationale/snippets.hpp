#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rationale/classifier.hpp"
#include "rationale/corpus.hpp"
#include "rationale/tokenize.hpp"

namespace rationale {

struct ScoredSnippet {
    Snippet snippet;
    double score = 0.0;
    Provenance scoredBy = Provenance::DocumentLevel;
};

struct SelectionConfig {
    double minScoreTh = 0.8;
    int maxNum = 500;

    // Phase-1 floor; fixed, distinct from minScoreTh.
    static constexpr double kBaseThreshold = 0.5;
};

struct IterConfig {
    std::size_t startN = 1000;
    std::size_t minN = 50;  // both even, startN >= minN >= 2
};

struct SelectionResult {
    // Phase-1 picks first (one per covered document), then phase-2 additions.
    std::vector<ScoredSnippet> selected;
    std::size_t phase1Count = 0;
    bool phase1ExceededMaxNum = false;
};

// Every snippet of every nonempty doc, scored, in (docId, start) order.
// Window stride is n/2 (floored when the halving schedule passes odd n).
std::vector<ScoredSnippet> score_all_snippets(const TrainedModel& model,
                                              std::span<const Document* const> docs,
                                              std::size_t n, unsigned threads = 1);

// Two-phase selection over descending scores, ties (docId, start) ascending.
// Phase 1: per-document best snippet when it scores >= 0.5.
// Phase 2: remaining snippets >= minScoreTh while the running count <= maxNum.
SelectionResult select_responsive_snippets(std::vector<ScoredSnippet> scored,
                                           const SelectionConfig& cfg);

// Uniform sample without replacement from the pooled windows of the given
// documents; the whole pool when it holds fewer than count snippets.
std::vector<Snippet> sample_nonresponsive_snippets(std::span<const Document* const> docs,
                                                   std::size_t n, std::size_t count,
                                                   std::uint64_t seed);

struct MethodConfig {
    TrainConfig train;
    SelectionConfig selection;
    std::size_t snippetSize = 50;
    // Nonresponsive sample size; defaults to the selected responsive count.
    std::optional<std::size_t> nonrespCount;
    unsigned threads = 1;
};

struct MethodResult {
    TrainedModel model;
    TrainedModel documentModel;
    SelectionResult finalSelection;
    std::vector<std::size_t> snippetSizes;  // training sizes visited, in order
};

// Snippet Model Method: document model -> score windows -> select -> sample
// nonresponsive -> retrain on snippets. Pass docModel to reuse a pretrained
// document model instead of fitting one.
MethodResult train_snippet_method(const Corpus& train, const MethodConfig& cfg,
                                  const TrainedModel* docModel = nullptr);

// Iterative Snippet Method: repeats the snippet step while halving the
// window size from startN down to minN (clamped).
MethodResult train_iterative_method(const Corpus& train, const IterConfig& iter,
                                    const MethodConfig& cfg,
                                    const TrainedModel* docModel = nullptr);

// Rationales are produced only for documents the document model calls
// responsive; otherwise the ranking is empty. Descending score, ties by
// start ascending.
std::vector<ScoredSnippet> rank_rationales(const Document& doc,
                                           const TrainedModel& rationaleModel,
                                           const TrainedModel& docModel,
                                           std::size_t n = 50);

// Audit export of selected training snippets, one record per line.
void save_selected_snippets(const SelectionResult& sel, const std::string& path);

}  // namespace rationale
