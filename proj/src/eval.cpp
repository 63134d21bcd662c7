#include "rationale/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "rationale/parallel.hpp"

namespace rationale {

namespace {

constexpr std::array<double, 6> kBucketEdges{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

int bucket_of(double score) {
    // Comparison-based so the bucket edges are exact: [lo, hi) except the
    // last bucket, which closes at 1.
    for (int i = 0; i < 4; ++i)
        if (score < kBucketEdges[static_cast<std::size_t>(i) + 1]) return i;
    return 4;
}

bool in_bucket(double score, int bucket) {
    const double lo = kBucketEdges[static_cast<std::size_t>(bucket)];
    const double hi = kBucketEdges[static_cast<std::size_t>(bucket) + 1];
    if (score < lo) return false;
    return bucket == 4 ? score <= hi : score < hi;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string method_display_name(const std::string& method) {
    if (method == "document") return "Document-Level Model";
    if (method == "snippet") return "Snippet Model";
    if (method == "iterative") return "Iterative Snippet Model";
    return method;
}

std::string bucket_label(int i) {
    if (i == 4) return "[0.9, 1]";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "[%.1f, %.1f)", kBucketEdges[static_cast<std::size_t>(i)],
                  kBucketEdges[static_cast<std::size_t>(i) + 1]);
    return buf;
}

}  // namespace

std::vector<const Document*> eligible_test_docs(const TrainedModel& docModel,
                                                const Corpus& test, unsigned threads) {
    const auto resp = test.with_label(Label::Responsive);
    std::vector<char> keep(resp.size(), 0);
    parallel_for(resp.size(), threads, [&](std::size_t i) {
        keep[i] = predict_proba(docModel, tokenize(resp[i]->text, resp[i]->id)) >= 0.5;
    });
    std::vector<const Document*> out;
    for (std::size_t i = 0; i < resp.size(); ++i)
        if (keep[i]) out.push_back(resp[i]);
    return out;
}

TokenSeq remove_rationale_tokens(const TokenSeq& seq, std::span<const Snippet> snippets) {
    std::vector<char> drop(seq.size(), 0);
    for (const auto& s : snippets) {
        if (s.docId != seq.docId)
            throw std::invalid_argument("snippet from document " + s.docId +
                                        " cannot be removed from " + seq.docId);
        if (s.length == 0 || s.end() > seq.size())
            throw std::out_of_range("snippet range [" + std::to_string(s.start) + ", " +
                                    std::to_string(s.end()) + ") outside document of " +
                                    std::to_string(seq.size()) + " tokens");
        std::fill(drop.begin() + static_cast<std::ptrdiff_t>(s.start),
                  drop.begin() + static_cast<std::ptrdiff_t>(s.end()), 1);
    }
    TokenSeq out;
    out.docId = seq.docId;
    out.tokens.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i)
        if (!drop[i]) out.tokens.push_back(seq.tokens[i]);
    return out;
}

ScoreReductionReport score_reduction_report(const TrainedModel& docModel,
                                            const TrainedModel& rationaleModel,
                                            const Corpus& test, std::size_t n,
                                            unsigned threads) {
    if (n < 2) throw std::invalid_argument("snippet size must be at least 2");
    const auto eligible = eligible_test_docs(docModel, test, threads);

    struct DocEval {
        bool covered = false;
        int bucket = -1;
        double original = 0.0;
        double reduced = 0.0;
        std::size_t tokens = 0;
        std::size_t removed = 0;
    };
    std::vector<DocEval> evals(eligible.size());

    const std::size_t stride = std::max<std::size_t>(1, n / 2);
    parallel_for(eligible.size(), threads, [&](std::size_t i) {
        DocEval& e = evals[i];
        const TokenSeq seq = tokenize(eligible[i]->text, eligible[i]->id);
        if (seq.empty()) return;  // uncovered: nothing to window

        e.original = predict_proba(docModel, vectorize(seq, docModel.space));
        double maxScore = -1.0;
        std::vector<std::pair<Snippet, double>> scored;
        for (const Snippet& w : window_snippets_stride(seq, n, stride)) {
            const double s = predict_proba(
                rationaleModel, vectorize(snippet_tokens(seq, w), rationaleModel.space));
            scored.emplace_back(w, s);
            maxScore = std::max(maxScore, s);
        }
        if (maxScore < 0.5) return;

        e.covered = true;
        e.bucket = bucket_of(maxScore);
        std::vector<Snippet> toRemove;
        for (const auto& [w, s] : scored)
            if (in_bucket(s, e.bucket)) toRemove.push_back(w);

        const TokenSeq rest = remove_rationale_tokens(seq, toRemove);
        e.reduced = predict_proba(docModel, vectorize(rest, docModel.space));
        e.tokens = seq.size();
        e.removed = seq.size() - rest.size();
    });

    ScoreReductionReport report;
    report.method = to_string(rationaleModel.provenance);
    report.eligible = eligible.size();
    for (int i = 0; i < 5; ++i) {
        report.buckets[static_cast<std::size_t>(i)].lo = kBucketEdges[static_cast<std::size_t>(i)];
        report.buckets[static_cast<std::size_t>(i)].hi = kBucketEdges[static_cast<std::size_t>(i) + 1];
    }
    report.totAvg.lo = 0.5;
    report.totAvg.hi = 1.0;

    std::array<double, 5> sumOrig{}, sumRed{};
    double totOrig = 0.0, totRed = 0.0, totTokens = 0.0, totRemoved = 0.0;
    for (const DocEval& e : evals) {
        if (!e.covered) {
            ++report.uncovered;
            continue;
        }
        auto& row = report.buckets[static_cast<std::size_t>(e.bucket)];
        ++row.nDocs;
        sumOrig[static_cast<std::size_t>(e.bucket)] += e.original;
        sumRed[static_cast<std::size_t>(e.bucket)] += e.reduced;
        ++report.totAvg.nDocs;
        totOrig += e.original;
        totRed += e.reduced;
        totTokens += static_cast<double>(e.tokens);
        totRemoved += static_cast<double>(e.removed);
    }
    for (std::size_t i = 0; i < 5; ++i) {
        auto& row = report.buckets[i];
        if (row.nDocs == 0) continue;
        row.avgDocScore = sumOrig[i] / static_cast<double>(row.nDocs);
        row.avgDocScoreRemoved = sumRed[i] / static_cast<double>(row.nDocs);
        row.avgReduction = row.avgDocScore - row.avgDocScoreRemoved;
    }
    if (report.totAvg.nDocs > 0) {
        report.totAvg.avgDocScore = totOrig / static_cast<double>(report.totAvg.nDocs);
        report.totAvg.avgDocScoreRemoved = totRed / static_cast<double>(report.totAvg.nDocs);
        report.totAvg.avgReduction =
            report.totAvg.avgDocScore - report.totAvg.avgDocScoreRemoved;
        report.tokens.avgTokensPerDoc = totTokens / static_cast<double>(report.totAvg.nDocs);
        report.tokens.avgTokensRemoved =
            totRemoved / static_cast<double>(report.totAvg.nDocs);
    }
    return report;
}

PRCurve pr_curve(const TrainedModel& docModel, const Corpus& test, std::size_t steps,
                 unsigned threads) {
    if (test.count_responsive() == 0)
        throw std::invalid_argument("PR curve needs at least one responsive document");
    if (steps < 2) throw std::invalid_argument("PR curve needs at least 2 steps");

    const auto& docs = test.docs();
    std::vector<double> scores(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t i) {
        scores[i] = predict_proba(docModel, tokenize(docs[i].text, docs[i].id));
    });

    // ascending (score, isResponsive), then prefix counts from the top
    std::vector<std::pair<double, char>> byScore(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i)
        byScore[i] = {scores[i], docs[i].label == Label::Responsive ? char(1) : char(0)};
    std::sort(byScore.begin(), byScore.end());

    std::vector<double> unique;
    for (const auto& [s, r] : byScore)
        if (unique.empty() || unique.back() != s) unique.push_back(s);

    std::vector<double> thresholds;
    if (unique.size() <= steps) {
        thresholds.assign(unique.rbegin(), unique.rend());
    } else {
        thresholds.reserve(steps);
        for (std::size_t i = 0; i < steps; ++i) {
            const std::size_t idx =
                (unique.size() - 1) - (i * (unique.size() - 1)) / (steps - 1);
            thresholds.push_back(unique[idx]);
        }
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                         thresholds.end());
    }

    std::vector<double> respAtOrAbove(byScore.size() + 1, 0.0);
    for (std::size_t i = byScore.size(); i-- > 0;)
        respAtOrAbove[i] = respAtOrAbove[i + 1] + (byScore[i].second ? 1.0 : 0.0);

    const double totalResp = static_cast<double>(test.count_responsive());
    PRCurve curve;
    for (const double t : thresholds) {
        const auto it = std::lower_bound(
            byScore.begin(), byScore.end(), t,
            [](const std::pair<double, char>& a, double v) { return a.first < v; });
        const auto idx = static_cast<std::size_t>(it - byScore.begin());
        const double predicted = static_cast<double>(byScore.size() - idx);
        const double tp = respAtOrAbove[idx];
        curve.points.push_back({t, tp / predicted, tp / totalResp});
    }
    return curve;
}

std::string render_report_text(std::span<const ScoreReductionReport> reports) {
    std::ostringstream out;
    const int labelWidth = 18;

    out << std::string(labelWidth, ' ');
    for (const auto& r : reports) {
        char buf[80];
        std::snprintf(buf, sizeof(buf), "| %-41s", method_display_name(r.method).c_str());
        out << buf;
    }
    out << '\n';
    out << "Snippet Score TH  ";
    for (std::size_t i = 0; i < reports.size(); ++i)
        out << "|  #Doc  AvgScore  SnippetRmd  Reduction ";
    out << '\n';

    const auto row = [&](const std::string& label,
                         const std::function<const BucketRow&(const ScoreReductionReport&)>&
                             pick) {
        char cell[80];
        std::snprintf(cell, sizeof(cell), "%-18s", label.c_str());
        out << cell;
        for (const auto& r : reports) {
            const BucketRow& b = pick(r);
            std::snprintf(cell, sizeof(cell), "| %5zu  %8.2f  %10.2f  %9.2f ", b.nDocs,
                          b.avgDocScore, b.avgDocScoreRemoved, b.avgReduction);
            out << cell;
        }
        out << '\n';
    };

    for (int i = 4; i >= 0; --i)
        row(bucket_label(i), [i](const ScoreReductionReport& r) -> const BucketRow& {
            return r.buckets[static_cast<std::size_t>(i)];
        });
    row("Tot/Avg",
        [](const ScoreReductionReport& r) -> const BucketRow& { return r.totAvg; });

    out << '\n';
    const auto statRow = [&](const std::string& label,
                             const std::function<std::string(const ScoreReductionReport&)>&
                                 pick) {
        char cell[80];
        std::snprintf(cell, sizeof(cell), "%-18s", label.c_str());
        out << cell;
        for (const auto& r : reports) {
            std::snprintf(cell, sizeof(cell), "| %-40s ", pick(r).c_str());
            out << cell;
        }
        out << '\n';
    };
    statRow("Avg tokens/doc", [](const ScoreReductionReport& r) {
        return fmt("%.1f", r.tokens.avgTokensPerDoc);
    });
    statRow("Avg tokens removed", [](const ScoreReductionReport& r) {
        return fmt("%.1f", r.tokens.avgTokensRemoved);
    });
    statRow("Eligible docs", [](const ScoreReductionReport& r) {
        return std::to_string(r.eligible);
    });
    statRow("Uncovered docs", [](const ScoreReductionReport& r) {
        return std::to_string(r.uncovered);
    });
    return out.str();
}

namespace {

constexpr const char* kCsvHeader =
    "section,method,lo,hi,n_docs,avg_doc_score,avg_doc_score_removed,avg_reduction,"
    "avg_tokens_per_doc,avg_tokens_removed,eligible,uncovered";

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_report_csv(const ScoreReductionReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report file: " + path);
    out << kCsvHeader << '\n';
    const auto bucketLine = [&](const char* section, const BucketRow& b) {
        out << section << ',' << report.method << ',' << g17(b.lo) << ',' << g17(b.hi)
            << ',' << b.nDocs << ',' << g17(b.avgDocScore) << ','
            << g17(b.avgDocScoreRemoved) << ',' << g17(b.avgReduction) << ",,,,\n";
    };
    for (const auto& b : report.buckets) bucketLine("bucket", b);
    bucketLine("totavg", report.totAvg);
    out << "tokens," << report.method << ",,,,,,," << g17(report.tokens.avgTokensPerDoc)
        << ',' << g17(report.tokens.avgTokensRemoved) << ",,\n";
    out << "meta," << report.method << ",,,,,,,,," << report.eligible << ','
        << report.uncovered << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

ScoreReductionReport read_report_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open report file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::runtime_error("unrecognized report file header: " + path);

    ScoreReductionReport report;
    std::size_t bucketIdx = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 12)
            throw std::runtime_error("malformed report row in " + path + ": " + line);
        report.method = f[1];
        if (f[0] == "bucket" || f[0] == "totavg") {
            BucketRow b;
            b.lo = std::stod(f[2]);
            b.hi = std::stod(f[3]);
            b.nDocs = std::stoull(f[4]);
            b.avgDocScore = std::stod(f[5]);
            b.avgDocScoreRemoved = std::stod(f[6]);
            b.avgReduction = std::stod(f[7]);
            if (f[0] == "totavg") {
                report.totAvg = b;
            } else {
                if (bucketIdx >= report.buckets.size())
                    throw std::runtime_error("too many bucket rows in " + path);
                report.buckets[bucketIdx++] = b;
            }
        } else if (f[0] == "tokens") {
            report.tokens.avgTokensPerDoc = std::stod(f[8]);
            report.tokens.avgTokensRemoved = std::stod(f[9]);
        } else if (f[0] == "meta") {
            report.eligible = std::stoull(f[10]);
            report.uncovered = std::stoull(f[11]);
        } else {
            throw std::runtime_error("unknown report row kind \"" + f[0] + "\" in " + path);
        }
    }
    if (bucketIdx != report.buckets.size())
        throw std::runtime_error("report file " + path + " is missing bucket rows");
    return report;
}

void write_pr_csv(const PRCurve& curve, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write PR curve file: " + path);
    out << "threshold,precision,recall\n";
    for (const auto& p : curve.points)
        out << g17(p.threshold) << ',' << g17(p.precision) << ',' << g17(p.recall) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rationale
