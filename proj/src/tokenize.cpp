#include "rationale/tokenize.hpp"

#include <stdexcept>

namespace rationale {

namespace {

// Decodes one UTF-8 codepoint at `i`; advances `i`. Malformed bytes decode
// as U+FFFD and consume a single byte.
char32_t next_codepoint(const std::string& s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xe0) == 0xc0) {
        len = 2;
        cp = b0 & 0x1f;
    } else if ((b0 & 0xf0) == 0xe0) {
        len = 3;
        cp = b0 & 0x0f;
    } else if ((b0 & 0xf8) == 0xf0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xfffd;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xfffd;
    }
    for (int k = 1; k < len; ++k) {
        if ((byte(i + k) & 0xc0) != 0x80) {
            ++i;
            return 0xfffd;
        }
        cp = (cp << 6) | (byte(i + k) & 0x3f);
    }
    i += len;
    return cp;
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_word_codepoint(char32_t cp) {
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
               (cp >= 'A' && cp <= 'Z');
    // Common punctuation, symbol and space blocks separate; the rest of the
    // non-ASCII range counts as word material.
    if (in(cp, 0x80, 0xbf) || cp == 0xd7 || cp == 0xf7) return false;
    if (in(cp, 0x2000, 0x206f)) return false;   // general punctuation
    if (in(cp, 0x2e00, 0x2e7f)) return false;   // supplemental punctuation
    if (in(cp, 0x3000, 0x303f)) return false;   // CJK symbols
    if (in(cp, 0xfe30, 0xfe4f)) return false;   // compat forms
    if (in(cp, 0xff00, 0xff0f) || in(cp, 0xff1a, 0xff20) ||
        in(cp, 0xff3b, 0xff40) || in(cp, 0xff5b, 0xff65))
        return false;                           // fullwidth punctuation
    return cp != 0xfffd;
}

char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (in(cp, 0xc0, 0xde) && cp != 0xd7) return cp + 0x20;  // Latin-1 capitals
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

}  // namespace

TokenSeq tokenize(const std::string& text, std::string docId) {
    TokenSeq seq;
    seq.docId = std::move(docId);
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = next_codepoint(text, i);
        if (is_word_codepoint(cp)) {
            append_utf8(current, to_lower(cp));
        } else if (!current.empty()) {
            seq.tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) seq.tokens.push_back(std::move(current));
    return seq;
}

std::vector<Snippet> window_snippets(const TokenSeq& seq, std::size_t n) {
    if (n < 2) throw std::invalid_argument("snippet size must be at least 2");
    if (n % 2 != 0) throw std::invalid_argument("snippet size must be even");
    return window_snippets_stride(seq, n, n / 2);
}

std::vector<Snippet> window_snippets_stride(const TokenSeq& seq, std::size_t n,
                                            std::size_t stride) {
    if (n < 2) throw std::invalid_argument("snippet size must be at least 2");
    if (stride == 0) throw std::invalid_argument("stride must be positive");
    if (seq.empty()) throw std::invalid_argument("cannot window an empty sequence");

    const std::size_t len = seq.size();
    std::vector<Snippet> out;
    if (len <= n) {
        out.push_back({seq.docId, 0, len});
        return out;
    }
    std::size_t start = 0;
    while (start + n <= len) {
        out.push_back({seq.docId, start, n});
        start += stride;
    }
    if (out.back().end() < len) out.push_back({seq.docId, len - n, n});
    return out;
}

std::span<const std::string> snippet_tokens(const TokenSeq& seq, const Snippet& s) {
    if (s.docId != seq.docId)
        throw std::invalid_argument("snippet " + s.docId + " does not belong to document " +
                                    seq.docId);
    if (s.length == 0 || s.end() > seq.size())
        throw std::out_of_range("snippet range [" + std::to_string(s.start) + ", " +
                                std::to_string(s.end()) + ") outside document of " +
                                std::to_string(seq.size()) + " tokens");
    return {seq.tokens.data() + s.start, s.length};
}

TokenSeq snippet_seq(const TokenSeq& seq, const Snippet& s) {
    const auto view = snippet_tokens(seq, s);
    TokenSeq out;
    out.docId = seq.docId;
    out.tokens.assign(view.begin(), view.end());
    return out;
}

}  // namespace rationale
