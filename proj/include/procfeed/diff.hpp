#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "segmentation.hpp"
#include "utf8.hpp"

namespace procfeed {

enum class DiffLabel { common, added, removed };

inline const char* to_string(DiffLabel l) {
    switch (l) {
    case DiffLabel::common: return "common";
    case DiffLabel::added: return "added";
    case DiffLabel::removed: return "removed";
    }
    return "?";
}

enum class DiffUnit { line, character };

inline const char* to_string(DiffUnit u) { return u == DiffUnit::line ? "line" : "character"; }

template <class Unit>
struct DiffSegment {
    DiffLabel label = DiffLabel::common;
    std::vector<Unit> units;

    friend bool operator==(const DiffSegment&, const DiffSegment&) = default;
};

/// Maximal labelled segments. Within each change between two common runs the
/// removed segment precedes the added one.
template <class Unit>
struct DiffScript {
    std::vector<DiffSegment<Unit>> segments;
    DiffUnit unit = DiffUnit::line;

    std::size_t count(DiffLabel label) const {
        std::size_t n = 0;
        for (const auto& s : segments) {
            if (s.label == label) n += s.units.size();
        }
        return n;
    }
    std::size_t edit_length() const { return count(DiffLabel::added) + count(DiffLabel::removed); }

    /// Units of the old (`DiffLabel::removed`) or new (`DiffLabel::added`) side.
    std::vector<Unit> side(DiffLabel which) const {
        std::vector<Unit> out;
        for (const auto& s : segments) {
            if (s.label == DiffLabel::common || s.label == which) out.insert(out.end(), s.units.begin(), s.units.end());
        }
        return out;
    }

    friend bool operator==(const DiffScript&, const DiffScript&) = default;
};

namespace detail {

enum class Op : std::uint8_t { keep, insert, erase };

/// Myers' greedy forward search for the shortest edit script between
/// a[0, n) and b[0, m). Returns the edit ops in document order. At each step
/// the furthest-reaching path is preferred, with deletions winning ties.
template <class Unit>
std::vector<Op> myers_ops(std::span<const Unit> a, std::span<const Unit> b) {
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    const auto m = static_cast<std::ptrdiff_t>(b.size());
    std::vector<Op> ops;
    if (n == 0 && m == 0) return ops;
    if (n == 0 || m == 0) {
        ops.assign(static_cast<std::size_t>(n + m), n == 0 ? Op::insert : Op::erase);
        return ops;
    }

    const std::ptrdiff_t max = n + m;
    const std::ptrdiff_t off = max + 1;
    std::vector<std::ptrdiff_t> v(static_cast<std::size_t>(2 * max + 3), 0);
    // trace[d] holds V[-d..d] after round d.
    std::vector<std::vector<std::ptrdiff_t>> trace;

    std::ptrdiff_t final_d = -1;
    for (std::ptrdiff_t d = 0; d <= max && final_d < 0; ++d) {
        for (std::ptrdiff_t k = -d; k <= d; k += 2) {
            std::ptrdiff_t x;
            if (k == -d || (k != d && v[off + k - 1] < v[off + k + 1])) {
                x = v[off + k + 1];
            } else {
                x = v[off + k - 1] + 1;
            }
            std::ptrdiff_t y = x - k;
            while (x < n && y < m && a[x] == b[y]) {
                ++x;
                ++y;
            }
            v[off + k] = x;
            if (x >= n && y >= m) final_d = d;
        }
        trace.emplace_back(v.begin() + (off - d), v.begin() + (off + d + 1));
    }

    std::vector<Op> rev;
    std::ptrdiff_t x = n;
    std::ptrdiff_t y = m;
    for (std::ptrdiff_t d = final_d; d > 0; --d) {
        const auto& prev = trace[static_cast<std::size_t>(d - 1)];
        auto at = [&](std::ptrdiff_t k) { return prev[static_cast<std::size_t>(k + d - 1)]; };
        const std::ptrdiff_t k = x - y;
        const bool down = k == -d || (k != d && at(k - 1) < at(k + 1));
        const std::ptrdiff_t prev_k = down ? k + 1 : k - 1;
        const std::ptrdiff_t prev_x = at(prev_k);
        const std::ptrdiff_t prev_y = prev_x - prev_k;
        const std::ptrdiff_t mid_x = down ? prev_x : prev_x + 1;
        while (x > mid_x) {
            rev.push_back(Op::keep);
            --x;
            --y;
        }
        rev.push_back(down ? Op::insert : Op::erase);
        x = prev_x;
        y = prev_y;
    }
    while (x > 0) {
        rev.push_back(Op::keep);
        --x;
    }
    ops.assign(rev.rbegin(), rev.rend());
    return ops;
}

} // namespace detail

/// Shortest edit script between two unit sequences.
template <class Unit>
DiffScript<Unit> diff(std::span<const Unit> a, std::span<const Unit> b, DiffUnit unit) {
    std::size_t prefix = 0;
    while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
    std::size_t suffix = 0;
    while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
           a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
        ++suffix;
    }
    const auto mid_a = a.subspan(prefix, a.size() - prefix - suffix);
    const auto mid_b = b.subspan(prefix, b.size() - prefix - suffix);
    const auto ops = detail::myers_ops(mid_a, mid_b);

    DiffScript<Unit> script;
    script.unit = unit;
    auto push = [&](DiffLabel label, auto first, auto last) {
        if (first == last) return;
        if (!script.segments.empty() && script.segments.back().label == label) {
            script.segments.back().units.insert(script.segments.back().units.end(), first, last);
        } else {
            script.segments.push_back({label, std::vector<Unit>(first, last)});
        }
    };

    push(DiffLabel::common, a.begin(), a.begin() + static_cast<std::ptrdiff_t>(prefix));
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t k = 0;
    while (k < ops.size()) {
        if (ops[k] == detail::Op::keep) {
            const std::size_t start = i;
            while (k < ops.size() && ops[k] == detail::Op::keep) {
                ++i;
                ++j;
                ++k;
            }
            push(DiffLabel::common, mid_a.begin() + static_cast<std::ptrdiff_t>(start),
                 mid_a.begin() + static_cast<std::ptrdiff_t>(i));
            continue;
        }
        std::vector<Unit> removed;
        std::vector<Unit> added;
        while (k < ops.size() && ops[k] != detail::Op::keep) {
            if (ops[k] == detail::Op::erase) {
                removed.push_back(mid_a[i++]);
            } else {
                added.push_back(mid_b[j++]);
            }
            ++k;
        }
        push(DiffLabel::removed, removed.begin(), removed.end());
        push(DiffLabel::added, added.begin(), added.end());
    }
    push(DiffLabel::common, a.end() - static_cast<std::ptrdiff_t>(suffix), a.end());
    return script;
}

template <class Unit>
DiffScript<Unit> diff(const std::vector<Unit>& a, const std::vector<Unit>& b, DiffUnit unit) {
    return diff(std::span<const Unit>(a), std::span<const Unit>(b), unit);
}

using LineDiff = DiffScript<std::string>;

inline std::vector<std::string> lines_of(std::string_view content) {
    std::vector<std::string> out;
    for (auto& p : split_lines(content)) out.push_back(std::move(p.text));
    return out;
}

inline LineDiff diff_lines(std::string_view a, std::string_view b) {
    return diff(lines_of(a), lines_of(b), DiffUnit::line);
}

inline DiffScript<char32_t> diff_chars(std::string_view a, std::string_view b) {
    const auto ua = utf8::decode(a);
    const auto ub = utf8::decode(b);
    return diff(std::span<const char32_t>(ua.data(), ua.size()), std::span<const char32_t>(ub.data(), ub.size()),
                DiffUnit::character);
}

struct ChangeCounts {
    std::size_t chars_added = 0;
    std::size_t chars_removed = 0;

    friend bool operator==(const ChangeCounts&, const ChangeCounts&) = default;
};

inline ChangeCounts added_removed_counts(std::string_view a, std::string_view b) {
    const auto script = diff_chars(a, b);
    return {script.count(DiffLabel::added), script.count(DiffLabel::removed)};
}

/// One run of a playback frame: common, newly added, or just removed text.
struct FrameSpan {
    DiffLabel label = DiffLabel::common;
    std::string text;

    friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

/// Character-level merge of two versions. Dropping removed spans yields
/// `curr`; dropping added spans yields `prev`.
inline std::vector<FrameSpan> playback_frame(std::string_view prev, std::string_view curr) {
    std::vector<FrameSpan> out;
    for (const auto& seg : diff_chars(prev, curr).segments) {
        out.push_back({seg.label, utf8::encode(std::u32string_view(seg.units.data(), seg.units.size()))});
    }
    return out;
}

} // namespace procfeed
