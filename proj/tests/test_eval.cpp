#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "rationale/eval.hpp"
#include "rationale/snippets.hpp"
#include "rationale/synth.hpp"

using namespace rationale;
namespace fs = std::filesystem;

namespace {

TrainedModel unigram_model(std::vector<std::string> features, std::vector<double> weights,
                           double bias) {
    TrainedModel m;
    m.space = make_feature_space(std::move(features), 1);
    m.weights = std::move(weights);
    m.bias = bias;
    return m;
}

TrainedModel topic_detector(double weight = 60.0, double bias = -1.0) {
    std::vector<std::string> feats;
    std::vector<double> w;
    for (int i = 0; i < 40; ++i) {
        feats.push_back("tp" + std::to_string(i));
        w.push_back(weight);
    }
    return unigram_model(std::move(feats), std::move(w), bias);
}

Document doc_of(std::string id, const std::vector<std::string>& tokens,
                Label label = Label::Responsive) {
    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) text += ' ';
        text += tokens[i];
    }
    return {std::move(id), std::move(text), label};
}

std::vector<std::string> background(std::size_t len, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < len; ++i) out.push_back("bg" + std::to_string(rng() % 40));
    return out;
}

TokenSeq make_seq(std::size_t len, std::string docId = "d") {
    TokenSeq seq;
    seq.docId = std::move(docId);
    for (std::size_t i = 0; i < len; ++i) seq.tokens.push_back("t" + std::to_string(i));
    return seq;
}

}  // namespace

TEST_CASE("eligible_test_docs: label gate and score boundary") {
    // "hot" carries weight 2 with bias -1: a doc that is all "hot" scores
    // sigmoid(1) > .5, a doc without it scores sigmoid(-1) < .5
    const auto model = unigram_model({"hot"}, {2.0}, -1.0);
    std::vector<Document> docs;
    docs.push_back(doc_of("resp-hot", {"hot", "hot", "hot"}, Label::Responsive));
    docs.push_back(doc_of("resp-cold", {"cold", "cold"}, Label::Responsive));
    docs.push_back(doc_of("nonresp-hot", {"hot", "hot"}, Label::Nonresponsive));
    const Corpus test{std::move(docs)};

    const auto eligible = eligible_test_docs(model, test);
    REQUIRE(eligible.size() == 1);
    CHECK(eligible[0]->id == "resp-hot");
}

TEST_CASE("eligible_test_docs: exact 0.5 is included") {
    const auto model = unigram_model({"x"}, {1.0}, 0.0);
    std::vector<Document> docs;
    docs.push_back(doc_of("zero", {"y", "z"}, Label::Responsive));  // no features -> 0.5
    const Corpus test{std::move(docs)};
    CHECK(eligible_test_docs(model, test).size() == 1);
}

TEST_CASE("eligible_test_docs: matches an independent recount on synthetic data") {
    GenConfig gen;
    gen.nResp = 30;
    gen.nNonresp = 60;
    gen.docLenMin = 120;
    gen.docLenMax = 220;
    gen.plantsPerRespDoc = 1;
    gen.signalStrength = 1.0;
    gen.backgroundVocab = 300;
    gen.topicVocab = 40;
    gen.seed = 77;
    const auto [test, truth] = generate(gen);
    const auto model = topic_detector();

    const auto eligible = eligible_test_docs(model, test, 2);
    std::size_t expected = 0;
    for (const auto& d : test.docs())
        if (d.label == Label::Responsive &&
            predict_proba(model, tokenize(d.text, d.id)) >= 0.5)
            ++expected;
    CHECK(eligible.size() == expected);
}

TEST_CASE("remove_rationale_tokens: removing nothing is the identity") {
    const auto seq = make_seq(40);
    const auto out = remove_rationale_tokens(seq, {});
    CHECK(out.tokens == seq.tokens);
}

TEST_CASE("remove_rationale_tokens: overlapping snippets delete their union") {
    const auto seq = make_seq(100);
    const Snippet a{"d", 0, 50}, b{"d", 25, 50};
    const Snippet snips[] = {a, b};
    const auto out = remove_rationale_tokens(seq, snips);
    REQUIRE(out.tokens.size() == 25);
    CHECK(out.tokens.front() == "t75");
    CHECK(out.tokens.back() == "t99");
}

TEST_CASE("remove_rationale_tokens: random sets match an interval-union oracle") {
    std::mt19937_64 rng(19);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t len = 20 + rng() % 200;
        const auto seq = make_seq(len);
        std::vector<Snippet> snips;
        std::vector<char> mask(len, 0);
        const int n = static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            const std::size_t start = rng() % len;
            const std::size_t maxLen = len - start;
            const std::size_t slen = 1 + rng() % maxLen;
            snips.push_back({"d", start, slen});
            for (std::size_t j = start; j < start + slen; ++j) mask[j] = 1;
        }
        const auto out = remove_rationale_tokens(seq, snips);
        std::vector<std::string> expected;
        for (std::size_t i = 0; i < len; ++i)
            if (!mask[i]) expected.push_back(seq.tokens[i]);
        CHECK(out.tokens == expected);
    }
}

TEST_CASE("remove_rationale_tokens: rejects foreign and out-of-range snippets") {
    const auto seq = make_seq(30);
    const Snippet foreign{"other", 0, 5};
    const Snippet tooLong{"d", 20, 20};
    CHECK_THROWS_AS(remove_rationale_tokens(seq, {&foreign, 1}), std::invalid_argument);
    CHECK_THROWS_AS(remove_rationale_tokens(seq, {&tooLong, 1}), std::out_of_range);
}

TEST_CASE("score_reduction_report: zero-snippet removal reproduces the doc score") {
    const auto model = topic_detector();
    std::vector<std::string> tokens = background(120, 30);
    for (std::size_t i = 10; i < 35; ++i) tokens[i] = "tp" + std::to_string(i % 40);
    const auto d = doc_of("a", tokens);

    const TokenSeq seq = tokenize(d.text, d.id);
    const double direct = predict_proba(model, vectorize(seq, model.space));
    const auto rescored =
        predict_proba(model, vectorize(remove_rationale_tokens(seq, {}), model.space));
    CHECK(direct == rescored);
}

TEST_CASE("score_reduction_report: bucket partition and aggregate identities") {
    GenConfig gen;
    gen.nResp = 40;
    gen.nNonresp = 80;
    gen.docLenMin = 150;
    gen.docLenMax = 300;
    gen.plantsPerRespDoc = 2;
    gen.signalStrength = 0.8;
    gen.backgroundVocab = 300;
    gen.topicVocab = 40;
    gen.seed = 31;
    const auto [test, truth] = generate(gen);
    const auto docModel = topic_detector(40.0, -1.0);
    const auto report = score_reduction_report(docModel, docModel, test, 50, 2);

    CHECK(report.method == "document");
    // bucket edges are exactly the published ones
    const double expectedEdges[] = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    for (int i = 0; i < 5; ++i) {
        CHECK(report.buckets[static_cast<std::size_t>(i)].lo == expectedEdges[i]);
        CHECK(report.buckets[static_cast<std::size_t>(i)].hi == expectedEdges[i + 1]);
    }
    // partition: bucket counts sum to the Tot/Avg count, and with the
    // uncovered docs account for every eligible document
    std::size_t total = 0;
    for (const auto& b : report.buckets) total += b.nDocs;
    CHECK(total == report.totAvg.nDocs);
    CHECK(report.totAvg.nDocs + report.uncovered == report.eligible);
    CHECK(report.eligible > 0);

    for (const auto& b : report.buckets) {
        if (b.nDocs == 0) continue;
        CHECK(std::abs(b.avgReduction - (b.avgDocScore - b.avgDocScoreRemoved)) < 1e-12);
        CHECK(b.avgReduction > -1.0);
        CHECK(b.avgReduction < 1.0);
    }
    CHECK(report.tokens.avgTokensRemoved <= report.tokens.avgTokensPerDoc);

    // Tot/Avg values are doc-weighted means over the buckets
    double weightedScore = 0.0, weightedRemoved = 0.0;
    for (const auto& b : report.buckets) {
        weightedScore += static_cast<double>(b.nDocs) * b.avgDocScore;
        weightedRemoved += static_cast<double>(b.nDocs) * b.avgDocScoreRemoved;
    }
    const auto tot = static_cast<double>(report.totAvg.nDocs);
    CHECK(report.totAvg.avgDocScore == doctest::Approx(weightedScore / tot).epsilon(1e-9));
    CHECK(report.totAvg.avgDocScoreRemoved ==
          doctest::Approx(weightedRemoved / tot).epsilon(1e-9));
}

TEST_CASE("score_reduction_report: docs whose snippets never reach 0.5 are uncovered") {
    // rationale model that scores everything at sigmoid(-2)
    const auto low = unigram_model({"tp0"}, {0.0}, -2.0);
    const auto docModel = topic_detector();

    GenConfig gen;
    gen.nResp = 10;
    gen.nNonresp = 20;
    gen.docLenMin = 120;
    gen.docLenMax = 200;
    gen.plantsPerRespDoc = 1;
    gen.signalStrength = 1.0;
    gen.backgroundVocab = 200;
    gen.topicVocab = 40;
    gen.seed = 33;
    const auto [test, truth] = generate(gen);

    const auto report = score_reduction_report(docModel, low, test, 50);
    CHECK(report.totAvg.nDocs == 0);
    CHECK(report.uncovered == report.eligible);
    CHECK(report.eligible > 0);
    for (const auto& b : report.buckets) CHECK(b.nDocs == 0);
}

TEST_CASE("pr_curve: endpoints and the separable case") {
    // resp docs score sigmoid(3)≈0.95, nonresp sigmoid(-1)≈0.27
    const auto model = unigram_model({"hot"}, {4.0}, -1.0);
    std::vector<Document> docs;
    for (int i = 0; i < 6; ++i)
        docs.push_back(doc_of("r" + std::to_string(i), {"hot", "hot"}, Label::Responsive));
    for (int i = 0; i < 14; ++i)
        docs.push_back(doc_of("n" + std::to_string(i), {"cold", "cold"},
                              Label::Nonresponsive));
    const Corpus test{std::move(docs)};

    const auto curve = pr_curve(model, test, 100);
    REQUIRE(!curve.points.empty());

    // lowest threshold: everything predicted responsive
    const auto& last = curve.points.back();
    CHECK(last.recall == doctest::Approx(1.0));
    CHECK(last.precision == doctest::Approx(6.0 / 20.0));

    // a perfectly separating model contains the ideal point
    bool ideal = false;
    for (const auto& p : curve.points)
        if (p.recall == doctest::Approx(1.0) && p.precision == doctest::Approx(1.0))
            ideal = true;
    CHECK(ideal);

    // recall never decreases along the sweep
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        CHECK(curve.points[i].recall <= curve.points[i + 1].recall + 1e-15);
        CHECK(curve.points[i].threshold >= curve.points[i + 1].threshold);
    }
}

TEST_CASE("pr_curve: every point matches a brute-force confusion matrix") {
    const auto model = unigram_model({"a", "b"}, {3.0, -2.0}, 0.2);
    std::vector<Document> docs;
    std::mt19937_64 rng(37);
    for (int i = 0; i < 20; ++i) {
        std::vector<std::string> tokens;
        for (int j = 0; j < 10; ++j) {
            const auto r = rng() % 3;
            tokens.push_back(r == 0 ? "a" : r == 1 ? "b" : "c");
        }
        docs.push_back(doc_of("d" + std::to_string(i), tokens,
                              i % 3 == 0 ? Label::Responsive : Label::Nonresponsive));
    }
    const Corpus test{std::move(docs)};
    const auto curve = pr_curve(model, test, 100);

    std::vector<std::pair<double, bool>> scored;
    for (const auto& d : test.docs())
        scored.emplace_back(predict_proba(model, tokenize(d.text, d.id)),
                            d.label == Label::Responsive);
    const double nResp = static_cast<double>(test.count_responsive());

    for (const auto& p : curve.points) {
        double tp = 0, fp = 0;
        for (const auto& [s, resp] : scored) {
            if (s >= p.threshold) (resp ? tp : fp) += 1;
        }
        CHECK(p.precision == doctest::Approx(tp / (tp + fp)).epsilon(1e-12));
        CHECK(p.recall == doctest::Approx(tp / nResp).epsilon(1e-12));
    }
}

TEST_CASE("pr_curve: needs a responsive document") {
    const auto model = unigram_model({"a"}, {1.0}, 0.0);
    std::vector<Document> docs{doc_of("n0", {"a"}, Label::Nonresponsive)};
    const Corpus test{std::move(docs)};
    CHECK_THROWS_AS(pr_curve(model, test, 100), std::invalid_argument);
}

TEST_CASE("report CSV: write/read round trip") {
    ScoreReductionReport r;
    r.method = "snippet";
    for (int i = 0; i < 5; ++i) {
        auto& b = r.buckets[static_cast<std::size_t>(i)];
        b.lo = 0.5 + 0.1 * i;
        b.hi = i == 4 ? 1.0 : 0.6 + 0.1 * i;
        b.nDocs = static_cast<std::size_t>(10 + i);
        b.avgDocScore = 0.7 + 0.01 * i;
        b.avgDocScoreRemoved = 0.3 + 0.01 * i;
        b.avgReduction = b.avgDocScore - b.avgDocScoreRemoved;
    }
    r.totAvg = {0.5, 1.0, 60, 0.8, 0.35, 0.45};
    r.tokens = {1275.25, 190.125};
    r.eligible = 70;
    r.uncovered = 10;

    const auto path = (fs::temp_directory_path() / "rationale_report_test.csv").string();
    write_report_csv(r, path);
    const auto back = read_report_csv(path);
    CHECK(back.method == r.method);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(back.buckets[i].nDocs == r.buckets[i].nDocs);
        CHECK(back.buckets[i].avgDocScore == r.buckets[i].avgDocScore);
        CHECK(back.buckets[i].avgReduction == r.buckets[i].avgReduction);
    }
    CHECK(back.totAvg.nDocs == r.totAvg.nDocs);
    CHECK(back.tokens.avgTokensPerDoc == r.tokens.avgTokensPerDoc);
    CHECK(back.tokens.avgTokensRemoved == r.tokens.avgTokensRemoved);
    CHECK(back.eligible == r.eligible);
    CHECK(back.uncovered == r.uncovered);
    fs::remove(path);

    const auto rendered = render_report_text({&back, 1});
    CHECK(rendered.find("Snippet Model") != std::string::npos);
    CHECK(rendered.find("Tot/Avg") != std::string::npos);
    CHECK(rendered.find("[0.9, 1]") != std::string::npos);
}

TEST_CASE("report CSV: unrecognized header rejected") {
    const auto path = (fs::temp_directory_path() / "rationale_bad_report.csv").string();
    {
        std::ofstream out(path);
        out << "something,else\n";
    }
    CHECK_THROWS_AS(read_report_csv(path), std::runtime_error);
    fs::remove(path);
}
