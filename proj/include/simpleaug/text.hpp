#pragma once
// Text normalization shared by every stage. Answers and questions are
// normalized once at ingestion; every later comparison (verification,
// dedup, rarity counts) works on the normalized forms.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simpleaug {

inline std::string to_lower_ascii(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out.push_back(c);
    }
    return out;
}

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
           (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

inline std::vector<std::string> split_tokens(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : s) {
        if (is_ascii_space(c)) {
            if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

inline bool is_digit_string(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

// "zero".."ten" -> "0".."10"; anything else passes through.
inline std::optional<std::string_view> number_word_to_digits(std::string_view token) {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 11> kTable{{
        {"zero", "0"}, {"one", "1"}, {"two", "2"}, {"three", "3"},
        {"four", "4"}, {"five", "5"}, {"six", "6"}, {"seven", "7"},
        {"eight", "8"}, {"nine", "9"}, {"ten", "10"},
    }};
    for (const auto& [word, digits] : kTable)
        if (token == word) return digits;
    return std::nullopt;
}

namespace detail {

inline std::string normalize_answer_pass(std::string_view raw) {
    std::string s = to_lower_ascii(raw);
    size_t begin = 0, end = s.size();
    while (begin < end && is_ascii_space(s[begin])) ++begin;
    while (end > begin && (is_ascii_space(s[end - 1]) || is_ascii_punct(s[end - 1]))) --end;
    std::vector<std::string> kept;
    for (auto& token : split_tokens(std::string_view(s).substr(begin, end - begin))) {
        if (token == "a" || token == "an" || token == "the") continue;
        if (auto digits = number_word_to_digits(token)) {
            kept.emplace_back(*digits);
        } else {
            kept.push_back(std::move(token));
        }
    }
    return join_tokens(kept);
}

}  // namespace detail

// Answer normalization: lowercase, trim, drop terminal punctuation, drop
// standalone articles, map number words to digits, collapse whitespace.
// Dropping a trailing article can re-expose terminal punctuation, so the
// pass repeats until stable (every rewrite shrinks the string, so this
// terminates). Returns nullopt when nothing is left; the caller drops the
// record.
inline std::optional<std::string> normalize_answer(std::string_view raw) {
    std::string out = detail::normalize_answer_pass(raw);
    for (;;) {
        std::string next = detail::normalize_answer_pass(out);
        if (next == out) break;
        out = std::move(next);
    }
    if (out.empty()) return std::nullopt;
    return out;
}

// Question normalization: lowercase, strip punctuation except apostrophes
// inside tokens, collapse whitespace. This string is the dedup key.
inline std::optional<std::string> normalize_question(std::string_view raw) {
    std::string s = to_lower_ascii(raw);
    std::string stripped;
    stripped.reserve(s.size());
    for (char c : s) {
        if (c == '\'' || !is_ascii_punct(c)) stripped.push_back(c);
    }
    std::vector<std::string> tokens = split_tokens(stripped);
    std::vector<std::string> kept;
    for (auto& token : tokens) {
        size_t b = 0, e = token.size();
        while (b < e && token[b] == '\'') ++b;
        while (e > b && token[e - 1] == '\'') --e;
        if (e > b) kept.push_back(token.substr(b, e - b));
    }
    if (kept.empty()) return std::nullopt;
    return join_tokens(kept);
}

}  // namespace simpleaug
