#include <doctest.h>

#include <random>
#include <stdexcept>
#include <set>

#include "rationale/tokenize.hpp"

using namespace rationale;

namespace {

TokenSeq make_seq(std::size_t len, std::string docId = "d") {
    TokenSeq seq;
    seq.docId = std::move(docId);
    for (std::size_t i = 0; i < len; ++i) seq.tokens.push_back("t" + std::to_string(i));
    return seq;
}

std::string join(const TokenSeq& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out += ' ';
        out += seq.tokens[i];
    }
    return out;
}

}  // namespace

TEST_CASE("tokenize: empty text") {
    CHECK(tokenize("").tokens.empty());
    CHECK(tokenize("   \t\n ").tokens.empty());
}

TEST_CASE("tokenize: lowercases and splits on punctuation") {
    const auto seq = tokenize("Re: Q3 earnings—CALL me");
    CHECK(seq.tokens == std::vector<std::string>{"re", "q3", "earnings", "call", "me"});
}

TEST_CASE("tokenize: idempotent on its own joined output") {
    for (const char* text :
         {"Hello, World! 123", "a--b__c", "Café résumé, CAFÉ!",
          "one  two\tthree\nfour", ""}) {
        const auto once = tokenize(text);
        const auto twice = tokenize(join(once));
        CHECK(once.tokens == twice.tokens);
    }
}

TEST_CASE("tokenize: tokens have no whitespace and are nonempty") {
    const auto seq = tokenize("The quick brown fox – jumps; over 42 lazy_dogs!");
    CHECK(!seq.tokens.empty());
    for (const auto& t : seq.tokens) {
        CHECK(!t.empty());
        CHECK(t.find(' ') == std::string::npos);
        CHECK(t.find('\t') == std::string::npos);
    }
}

TEST_CASE("window_snippets: stride arithmetic at L=100, N=50") {
    const auto w = window_snippets(make_seq(100), 50);
    REQUIRE(w.size() == 3);
    CHECK(w[0].start == 0);
    CHECK(w[1].start == 25);
    CHECK(w[2].start == 50);
    for (const auto& s : w) CHECK(s.length == 50);
}

TEST_CASE("window_snippets: short document yields one whole-sequence snippet") {
    const auto w = window_snippets(make_seq(40), 50);
    REQUIRE(w.size() == 1);
    CHECK(w[0].start == 0);
    CHECK(w[0].length == 40);
}

TEST_CASE("window_snippets: end-anchored final window at L=60, N=50") {
    // enumerated by hand: aligned start 0, then 25 would overrun, so the
    // last window anchors at 60-50=10; together they cover [0, 60) once each
    const auto w = window_snippets(make_seq(60), 50);
    REQUIRE(w.size() == 2);
    CHECK(w[0].start == 0);
    CHECK(w[1].start == 10);
    std::vector<char> covered(60, 0);
    for (const auto& s : w)
        for (std::size_t i = s.start; i < s.end(); ++i) covered[i] = 1;
    for (const char c : covered) CHECK(c == 1);
}

TEST_CASE("window_snippets: rejects bad sizes and empty input") {
    const auto seq = make_seq(10);
    CHECK_THROWS_AS(window_snippets(seq, 0), std::invalid_argument);
    CHECK_THROWS_AS(window_snippets(seq, 1), std::invalid_argument);
    CHECK_THROWS_AS(window_snippets(seq, 7), std::invalid_argument);
    CHECK_THROWS_AS(window_snippets(make_seq(0), 4), std::invalid_argument);
}

TEST_CASE("window_snippets: coverage, overlap and ordering properties") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t len = 1 + rng() % 400;
        const std::size_t n = 2 * (1 + rng() % 60);
        const auto seq = make_seq(len);
        const auto w = window_snippets(seq, n);

        std::vector<char> covered(len, 0);
        std::set<std::pair<std::size_t, std::size_t>> distinct;
        for (const auto& s : w) {
            CHECK(s.end() <= len);
            CHECK(distinct.insert({s.start, s.length}).second);
            for (std::size_t i = s.start; i < s.end(); ++i) covered[i] = 1;
        }
        for (const char c : covered) CHECK(c == 1);
        for (std::size_t i = 0; i + 1 < w.size(); ++i) CHECK(w[i].start < w[i + 1].start);
        // aligned consecutive windows overlap by exactly n/2
        if (len > n)
            for (std::size_t i = 0; i + 2 < w.size(); ++i)
                CHECK(w[i + 1].start - w[i].start == n / 2);
        if (len <= n) {
            CHECK(w.size() == 1);
            CHECK(w[0].length == len);
        } else {
            for (const auto& s : w) CHECK(s.length == n);
        }
    }
}

TEST_CASE("snippet_tokens: view matches the source subsequence") {
    const auto seq = make_seq(30);
    const Snippet s{"d", 5, 10};
    const auto view = snippet_tokens(seq, s);
    REQUIRE(view.size() == 10);
    CHECK(view.front() == "t5");
    CHECK(view.back() == "t14");

    CHECK_THROWS_AS(snippet_tokens(seq, Snippet{"other", 0, 5}), std::invalid_argument);
    CHECK_THROWS_AS(snippet_tokens(seq, Snippet{"d", 25, 10}), std::out_of_range);
    CHECK_THROWS_AS(snippet_tokens(seq, Snippet{"d", 0, 0}), std::out_of_range);
}

TEST_CASE("window_snippets_stride: floors the stride for odd sizes") {
    const auto seq = make_seq(300);
    const auto w = window_snippets_stride(seq, 125, 62);
    for (const auto& s : w) CHECK(s.length == 125);
    std::vector<char> covered(300, 0);
    for (const auto& s : w)
        for (std::size_t i = s.start; i < s.end(); ++i) covered[i] = 1;
    for (const char c : covered) CHECK(c == 1);
}
