#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "utf8.hpp"

namespace procfeed {

enum class Granularity { paragraph, sentence, line };

inline const char* to_string(Granularity g) {
    switch (g) {
    case Granularity::paragraph: return "paragraph";
    case Granularity::sentence: return "sentence";
    case Granularity::line: return "line";
    }
    return "?";
}

inline constexpr int kDefaultNgramN = 5;

/// Language-independent segmentation parameters. Delimiters are sets of
/// characters (Unicode scalar values), never locale rules.
struct SegmentationConfig {
    std::set<char32_t> word_delimiters{U' ', U'\t', U'\n'};
    std::set<char32_t> sentence_delimiters{U'.', U'!', U'?'};
    int ngram_n = kDefaultNgramN;

    /// Builds a delimiter set from the characters of a UTF-8 string.
    static std::set<char32_t> delimiter_set(std::string_view chars) {
        const auto cps = utf8::decode(chars);
        return {cps.begin(), cps.end()};
    }

    void validate() const {
        if (word_delimiters.empty()) throw std::invalid_argument("word delimiter set must not be empty");
        if (sentence_delimiters.empty()) throw std::invalid_argument("sentence delimiter set must not be empty");
        if (ngram_n < 1) throw std::invalid_argument("n-gram size must be at least 1");
    }
};

/// A paragraph, sentence or line of one snapshot.
struct Passage {
    std::string text;
    std::size_t ordinal = 0;
    Granularity granularity = Granularity::paragraph;

    std::size_t length() const { return utf8::length(text); }

    friend bool operator==(const Passage&, const Passage&) = default;
};

namespace detail {

inline bool is_blank(std::u32string_view s, const std::set<char32_t>& blanks) {
    for (char32_t c : s) {
        if (!blanks.count(c)) return false;
    }
    return true;
}

inline std::u32string_view trim(std::u32string_view s, const std::set<char32_t>& blanks) {
    while (!s.empty() && blanks.count(s.front())) s.remove_prefix(1);
    while (!s.empty() && blanks.count(s.back())) s.remove_suffix(1);
    return s;
}

inline const std::set<char32_t>& paragraph_blanks() {
    static const std::set<char32_t> blanks{U' ', U'\t', U'\r', U'\f', U'\v'};
    return blanks;
}

/// Runs of text between newlines, dropping blank runs.
inline std::vector<std::u32string_view> paragraph_views(std::u32string_view text) {
    std::vector<std::u32string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == U'\n') {
            auto run = text.substr(start, i - start);
            if (!run.empty() && !is_blank(run, paragraph_blanks())) out.push_back(run);
            start = i + 1;
        }
    }
    return out;
}

} // namespace detail

/// Paragraphs are maximal runs of text separated by one or more newlines.
inline std::vector<Passage> split_paragraphs(std::string_view content) {
    const auto text = utf8::decode(content);
    std::vector<Passage> out;
    for (auto run : detail::paragraph_views(text)) {
        out.push_back({utf8::encode(run), out.size(), Granularity::paragraph});
    }
    return out;
}

/// Sentences end at a run of sentence delimiters (kept with the sentence) or
/// at a paragraph boundary. Word delimiters around a sentence are trimmed.
inline std::vector<Passage> split_sentences(std::string_view content, const SegmentationConfig& cfg) {
    const auto text = utf8::decode(content);
    std::vector<Passage> out;
    auto emit = [&](std::u32string_view s) {
        s = detail::trim(s, cfg.word_delimiters);
        if (s.empty() || detail::is_blank(s, detail::paragraph_blanks())) return;
        out.push_back({utf8::encode(s), out.size(), Granularity::sentence});
    };
    for (auto para : detail::paragraph_views(text)) {
        std::size_t start = 0;
        for (std::size_t i = 0; i < para.size(); ++i) {
            if (!cfg.sentence_delimiters.count(para[i])) continue;
            if (i + 1 < para.size() && cfg.sentence_delimiters.count(para[i + 1])) continue;
            emit(para.substr(start, i + 1 - start));
            start = i + 1;
        }
        if (start < para.size()) emit(para.substr(start));
    }
    return out;
}

/// Lines split on '\n'. Blank lines are kept, so empty content is one empty
/// line and joining the texts with '\n' gives back the content.
inline std::vector<Passage> split_lines(std::string_view content) {
    std::vector<Passage> out;
    std::size_t start = 0;
    while (true) {
        const auto nl = content.find('\n', start);
        const auto end = nl == std::string_view::npos ? content.size() : nl;
        out.push_back({std::string(content.substr(start, end - start)), out.size(), Granularity::line});
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return out;
}

inline std::vector<Passage> split_passages(std::string_view content, Granularity g, const SegmentationConfig& cfg) {
    switch (g) {
    case Granularity::paragraph: return split_paragraphs(content);
    case Granularity::sentence: return split_sentences(content, cfg);
    case Granularity::line: return split_lines(content);
    }
    return {};
}

/// Maximal runs of non-delimiter characters; case-sensitive.
inline std::vector<std::string> tokenize_words(std::string_view content, const SegmentationConfig& cfg) {
    const auto text = utf8::decode(content);
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && cfg.word_delimiters.count(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !cfg.word_delimiters.count(text[i])) ++i;
        if (i > start) out.push_back(utf8::encode(std::u32string_view(text).substr(start, i - start)));
    }
    return out;
}

/// Overlapping character n-grams in order. Text shorter than n yields the
/// whole text as its single gram.
inline std::vector<std::string> char_ngrams(std::string_view text, int n) {
    if (n < 1) throw std::invalid_argument("n-gram size must be at least 1");
    const auto cps = utf8::decode(text);
    const auto width = static_cast<std::size_t>(n);
    std::vector<std::string> out;
    if (cps.size() < width) {
        out.emplace_back(text);
        return out;
    }
    const std::u32string_view view(cps);
    out.reserve(cps.size() - width + 1);
    for (std::size_t i = 0; i + width <= cps.size(); ++i) out.push_back(utf8::encode(view.substr(i, width)));
    return out;
}

} // namespace procfeed
