#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rationale {

struct TokenSeq {
    std::string docId;
    std::vector<std::string> tokens;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

// A contiguous token window of a document, identified by provenance.
struct Snippet {
    std::string docId;
    std::size_t start = 0;
    std::size_t length = 0;

    std::size_t end() const { return start + length; }
    bool operator==(const Snippet&) const = default;
};

// Lowercased maximal runs of letters/digits; everything else separates.
// ASCII is classified exactly; non-ASCII codepoints count as word
// characters unless they fall in common punctuation blocks.
TokenSeq tokenize(const std::string& text, std::string docId = {});

// Windows of length n at stride n/2 starting at 0. If the last aligned
// window would overrun, a final window anchored at L-n is emitted so every
// token is covered. L <= n yields one whole-sequence snippet. n must be
// even and >= 2; seq must be nonempty.
std::vector<Snippet> window_snippets(const TokenSeq& seq, std::size_t n);

// Explicit-stride variant. The iterative halving schedule passes odd sizes
// (1000 -> ... -> 125 -> 62) and floors the stride for those.
std::vector<Snippet> window_snippets_stride(const TokenSeq& seq, std::size_t n,
                                            std::size_t stride);

// Bounds-checked view of the snippet's tokens inside its source sequence.
std::span<const std::string> snippet_tokens(const TokenSeq& seq, const Snippet& s);

// Materializes the snippet as its own sequence (keeps the source docId).
TokenSeq snippet_seq(const TokenSeq& seq, const Snippet& s);

}  // namespace rationale
