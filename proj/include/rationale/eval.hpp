#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rationale/classifier.hpp"
#include "rationale/corpus.hpp"
#include "rationale/tokenize.hpp"

namespace rationale {

struct BucketRow {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t nDocs = 0;
    double avgDocScore = 0.0;
    double avgDocScoreRemoved = 0.0;
    double avgReduction = 0.0;
};

struct TokenStats {
    double avgTokensPerDoc = 0.0;
    double avgTokensRemoved = 0.0;
};

// Mirrors the score-reduction tables: five buckets over the largest snippet
// score, a Tot/Avg row, token-removal stats, and the count of eligible docs
// whose best snippet never reached 0.5.
struct ScoreReductionReport {
    std::string method;
    std::array<BucketRow, 5> buckets;  // ascending: [0.5,0.6) ... [0.9,1.0]
    BucketRow totAvg;
    TokenStats tokens;
    std::size_t eligible = 0;
    std::size_t uncovered = 0;
};

struct PRPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct PRCurve {
    std::vector<PRPoint> points;  // descending threshold; recall non-decreasing
};

// Test documents labeled responsive that the document model also scores >= 0.5.
std::vector<const Document*> eligible_test_docs(const TrainedModel& docModel,
                                                const Corpus& test,
                                                unsigned threads = 1);

// Deletes the union of the snippets' token ranges; survivors keep order.
TokenSeq remove_rationale_tokens(const TokenSeq& seq, std::span<const Snippet> snippets);

ScoreReductionReport score_reduction_report(const TrainedModel& docModel,
                                            const TrainedModel& rationaleModel,
                                            const Corpus& test, std::size_t n = 50,
                                            unsigned threads = 1);

PRCurve pr_curve(const TrainedModel& docModel, const Corpus& test,
                 std::size_t steps = 100, unsigned threads = 1);

// Side-by-side plain-text rendering in the published column order.
std::string render_report_text(std::span<const ScoreReductionReport> reports);

void write_report_csv(const ScoreReductionReport& report, const std::string& path);
ScoreReductionReport read_report_csv(const std::string& path);

void write_pr_csv(const PRCurve& curve, const std::string& path);

}  // namespace rationale
