#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "diff.hpp"
#include "errors.hpp"
#include "identity.hpp"
#include "revision_model.hpp"
#include "segmentation.hpp"
#include "similarity.hpp"
#include "utf8.hpp"

namespace procfeed {

struct DescriptiveStats {
    std::size_t total_characters = 0;
    std::size_t total_words = 0;
    std::size_t total_sentences = 0;
    std::size_t total_paragraphs = 0;
    std::size_t total_lines = 0;
    std::int64_t elapsed_ms = 0;
    std::int64_t active_ms = 0;
    /// Characters added across all revisions, per active minute.
    double avg_chars_per_minute = 0.0;
    std::size_t chars_added = 0;
    std::size_t chars_removed = 0;

    friend bool operator==(const DescriptiveStats&, const DescriptiveStats&) = default;
};

/// Character changes between snapshot i-1 and i; entry 0 counts the first
/// snapshot as entirely added.
inline std::vector<ChangeCounts> snapshot_changes(const RevisionHistory& h) {
    std::vector<ChangeCounts> out;
    out.reserve(h.snapshots.size());
    for (std::size_t i = 0; i < h.snapshots.size(); ++i) {
        if (i == 0) {
            out.push_back({utf8::length(h.snapshots[0].content), 0});
        } else {
            out.push_back(added_removed_counts(h.snapshots[i - 1].content, h.snapshots[i].content));
        }
    }
    return out;
}

inline double per_minute(std::size_t count, std::int64_t ms) {
    return ms <= 0 ? 0.0 : static_cast<double>(count) * 60000.0 / static_cast<double>(ms);
}

inline DescriptiveStats compute_stats(const RevisionHistory& h, const SegmentationConfig& cfg,
                                      const TimelineSegmentation& seg, const std::vector<ChangeCounts>& changes) {
    DescriptiveStats s;
    if (h.snapshots.empty()) return s;
    const auto& final_text = h.snapshots.back().content;
    s.total_characters = utf8::length(final_text);
    s.total_words = tokenize_words(final_text, cfg).size();
    s.total_sentences = split_sentences(final_text, cfg).size();
    s.total_paragraphs = split_paragraphs(final_text).size();
    // A trailing newline terminates the last line rather than starting one.
    s.total_lines = split_lines(final_text).size() - (final_text.empty() || final_text.back() == '\n' ? 1 : 0);
    s.elapsed_ms = h.elapsed_ms();
    s.active_ms = seg.total_active_ms();
    for (std::size_t i = 1; i < changes.size(); ++i) {
        s.chars_added += changes[i].chars_added;
        s.chars_removed += changes[i].chars_removed;
    }
    s.avg_chars_per_minute = per_minute(s.chars_added, s.active_ms);
    return s;
}

inline DescriptiveStats compute_stats(const RevisionHistory& h, const SegmentationConfig& cfg,
                                      const TimelineSegmentation& seg) {
    return compute_stats(h, cfg, seg, snapshot_changes(h));
}

// PV1 -----------------------------------------------------------------------

struct PlaybackFrame {
    std::size_t index = 0;
    TimestampMs t = 0;
    std::vector<FrameSpan> spans;
};

/// One frame per revision after the first, showing its changes inline.
inline std::vector<PlaybackFrame> build_pv1_frames(const RevisionHistory& h) {
    std::vector<PlaybackFrame> out;
    for (std::size_t i = 1; i < h.snapshots.size(); ++i) {
        out.push_back({i, h.snapshots[i].t, playback_frame(h.snapshots[i - 1].content, h.snapshots[i].content)});
    }
    return out;
}

// PV2 -----------------------------------------------------------------------

struct AreaSeries {
    PassageId id;
    std::size_t origin = 0;
    std::vector<std::size_t> sizes;
    /// Passage text at each snapshot; nullopt where the passage is absent.
    std::vector<std::optional<std::string>> texts;
};

struct AreaChart {
    Granularity granularity = Granularity::paragraph;
    std::vector<AreaSeries> series;
};

/// Per-identity passage length at every snapshot, stacked in order of first
/// appearance. Absent identities contribute 0.
inline AreaChart build_pv2_area(const IdentityMatrix& m) {
    AreaChart chart;
    chart.granularity = m.granularity;
    const std::size_t steps = m.snapshots.size();
    std::map<PassageId, std::size_t> slot;
    for (std::size_t i = 0; i < steps; ++i) {
        for (const auto& pv : m.snapshots[i]) {
            auto [it, fresh] = slot.emplace(pv.id, chart.series.size());
            if (fresh) {
                chart.series.push_back({pv.id, i, std::vector<std::size_t>(steps, 0),
                                        std::vector<std::optional<std::string>>(steps)});
            }
            auto& series = chart.series[it->second];
            series.sizes[i] += pv.passage.length();
            auto& text = series.texts[i];
            // Only the per-passage matching rule can put one identity on two
            // passages of a snapshot.
            if (text) {
                *text += '\n';
                *text += pv.passage.text;
            } else {
                text = pv.passage.text;
            }
        }
    }
    return chart;
}

// PV3 -----------------------------------------------------------------------

struct ActivityChart {
    Granularity granularity = Granularity::paragraph;
    /// Identities at each snapshot in document order.
    std::vector<std::vector<PassageId>> order;
    /// Identities edited or introduced at each snapshot.
    std::vector<std::vector<PassageId>> active;
};

/// A passage is active at snapshot i > 0 when its text differs from the
/// same identity at i-1 or the identity is absent at i-1. Everything is
/// active at snapshot 0.
inline ActivityChart build_pv3_active(const IdentityMatrix& m) {
    ActivityChart chart;
    chart.granularity = m.granularity;
    for (std::size_t i = 0; i < m.snapshots.size(); ++i) {
        std::vector<PassageId> order;
        std::vector<PassageId> active;
        std::map<PassageId, std::string> before;
        if (i > 0) {
            for (const auto& pv : m.snapshots[i - 1]) before[pv.id] += pv.passage.text + '\n';
        }
        std::map<PassageId, std::string> now;
        for (const auto& pv : m.snapshots[i]) now[pv.id] += pv.passage.text + '\n';
        for (const auto& pv : m.snapshots[i]) {
            if (std::find(order.begin(), order.end(), pv.id) != order.end()) continue;
            order.push_back(pv.id);
            auto prev = before.find(pv.id);
            if (i == 0 || prev == before.end() || prev->second != now[pv.id]) active.push_back(pv.id);
        }
        chart.order.push_back(std::move(order));
        chart.active.push_back(std::move(active));
    }
    return chart;
}

// PV4 -----------------------------------------------------------------------

using WordCounts = std::vector<std::pair<std::string, std::size_t>>;

/// Counts sorted by frequency (descending) then by byte-wise word order.
inline WordCounts rank_words(const std::vector<std::string>& words, std::size_t top_k) {
    std::map<std::string, std::size_t> counts;
    for (const auto& w : words) ++counts[w];
    WordCounts out(counts.begin(), counts.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (out.size() > top_k) out.resize(top_k);
    return out;
}

inline WordCounts build_pv4_words(const RevisionHistory& h, const SegmentationConfig& cfg, std::size_t top_k) {
    if (h.snapshots.empty()) return {};
    return rank_words(tokenize_words(h.snapshots.back().content, cfg), top_k);
}

/// Words appearing in text removed between revisions. Removed runs come from
/// the character diff, so a run may hold only part of a word.
inline WordCounts build_pv4_removed_words(const RevisionHistory& h, const SegmentationConfig& cfg,
                                          std::size_t top_k) {
    std::vector<std::string> words;
    for (std::size_t i = 1; i < h.snapshots.size(); ++i) {
        for (const auto& seg : diff_chars(h.snapshots[i - 1].content, h.snapshots[i].content).segments) {
            if (seg.label != DiffLabel::removed) continue;
            auto w = tokenize_words(utf8::encode(std::u32string_view(seg.units.data(), seg.units.size())), cfg);
            words.insert(words.end(), w.begin(), w.end());
        }
    }
    return rank_words(words, top_k);
}

// PV5 -----------------------------------------------------------------------

struct Heatmap {
    std::vector<std::string> sentences;
    std::vector<std::vector<double>> matrix;
};

inline Heatmap build_pv5_heatmap(const std::vector<Passage>& final_sentences, const SegmentationConfig& cfg) {
    Heatmap hm;
    const std::size_t k = final_sentences.size();
    std::vector<NGramProfile> profiles;
    profiles.reserve(k);
    for (const auto& s : final_sentences) {
        hm.sentences.push_back(s.text);
        profiles.push_back(build_profile(s, cfg.ngram_n));
    }
    hm.matrix.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        hm.matrix[i][i] = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            const double s = similarity(profiles[i], profiles[j]);
            hm.matrix[i][j] = s;
            hm.matrix[j][i] = s;
        }
    }
    return hm;
}

// PV6 -----------------------------------------------------------------------

struct TypingPoint {
    TimestampMs t = 0;
    std::size_t doc_length = 0;
    double chars_per_minute = 0.0;

    friend bool operator==(const TypingPoint&, const TypingPoint&) = default;
};

/// Document length at each snapshot with the typing speed of the step that
/// produced it. Steps across an idle gap report 0.
inline std::vector<TypingPoint> build_pv6_series(const RevisionHistory& h, const TimelineSegmentation& seg,
                                                 const std::vector<ChangeCounts>& changes) {
    std::vector<TypingPoint> out;
    for (std::size_t i = 0; i < h.snapshots.size(); ++i) {
        TypingPoint p{h.snapshots[i].t, utf8::length(h.snapshots[i].content), 0.0};
        if (i > 0) {
            const auto gap = h.snapshots[i].t - h.snapshots[i - 1].t;
            if (!is_idle_gap(gap, seg.idle_gap_threshold_ms)) p.chars_per_minute = per_minute(changes[i].chars_added, gap);
        }
        out.push_back(p);
    }
    return out;
}

inline std::vector<TypingPoint> build_pv6_series(const RevisionHistory& h, const TimelineSegmentation& seg) {
    return build_pv6_series(h, seg, snapshot_changes(h));
}

// PV7 -----------------------------------------------------------------------

struct ChangePoint {
    TimestampMs t = 0;
    std::size_t chars_added = 0;
    std::size_t chars_removed = 0;

    friend bool operator==(const ChangePoint&, const ChangePoint&) = default;
};

inline std::vector<ChangePoint> build_pv7_timeline(const RevisionHistory& h, const std::vector<ChangeCounts>& changes) {
    std::vector<ChangePoint> out;
    for (std::size_t i = 0; i < h.snapshots.size(); ++i) {
        out.push_back({h.snapshots[i].t, changes[i].chars_added, changes[i].chars_removed});
    }
    return out;
}

inline std::vector<ChangePoint> build_pv7_timeline(const RevisionHistory& h) {
    return build_pv7_timeline(h, snapshot_changes(h));
}

struct PairDiff {
    std::size_t from = 0;
    std::size_t to = 0;
    LineDiff script;
    ChangeCounts chars;
};

/// Line diff between any two snapshots, in either order.
inline PairDiff any_to_any_diff(const RevisionHistory& h, std::size_t i, std::size_t j) {
    const auto n = h.snapshots.size();
    if (i >= n || j >= n) {
        throw Error(ErrorCode::IndexOutOfRange, "snapshot pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                                    ") outside [0, " + std::to_string(n) + ")");
    }
    const auto& a = h.snapshots[i].content;
    const auto& b = h.snapshots[j].content;
    return {i, j, diff_lines(a, b), added_removed_counts(a, b)};
}

// Bundle --------------------------------------------------------------------

inline constexpr std::size_t kDefaultTopK = 25;

struct AnalysisOptions {
    SegmentationConfig segmentation;
    double threshold = kDefaultThreshold;
    std::int64_t idle_gap_ms = kDefaultIdleGapMs;
    std::size_t top_k = kDefaultTopK;
    MatchingRule rule = MatchingRule::one_to_one;
};

struct PVBundle {
    AnalysisOptions options;
    RevisionHistory history;
    DescriptiveStats stats;
    std::vector<PlaybackFrame> pv1_frames;
    std::vector<AreaChart> pv2_area;
    std::vector<ActivityChart> pv3_active;
    WordCounts pv4_words;
    WordCounts pv4_removed_words;
    Heatmap pv5_heatmap;
    std::vector<TypingPoint> pv6_series;
    std::vector<ChangePoint> pv7_timeline;
    std::vector<ExecutionEvent> pv8_executions;
};

/// Passage granularities charted for a session kind.
inline std::vector<Granularity> charted_granularities(SessionKind kind) {
    if (kind == SessionKind::code) return {Granularity::line};
    return {Granularity::paragraph, Granularity::sentence};
}

inline PVBundle build_bundle(const RevisionHistory& h, const AnalysisOptions& opt) {
    opt.segmentation.validate();
    if (h.snapshots.empty()) throw Error(ErrorCode::EmptyHistory, "cannot analyze an empty history");

    PVBundle b;
    b.options = opt;
    b.history = h;
    const auto seg = segment_timeline(h, opt.idle_gap_ms);
    const auto changes = snapshot_changes(h);

    b.stats = compute_stats(h, opt.segmentation, seg, changes);
    b.pv1_frames = build_pv1_frames(h);
    for (auto g : charted_granularities(h.kind)) {
        const auto m = track_passages(h, g, opt.segmentation, opt.threshold, opt.rule);
        b.pv2_area.push_back(build_pv2_area(m));
        b.pv3_active.push_back(build_pv3_active(m));
    }
    b.pv4_words = build_pv4_words(h, opt.segmentation, opt.top_k);
    b.pv4_removed_words = build_pv4_removed_words(h, opt.segmentation, opt.top_k);
    b.pv5_heatmap = build_pv5_heatmap(split_sentences(h.snapshots.back().content, opt.segmentation), opt.segmentation);
    b.pv6_series = build_pv6_series(h, seg, changes);
    b.pv7_timeline = build_pv7_timeline(h, changes);
    b.pv8_executions = h.executions;
    return b;
}

inline std::string format_duration(std::int64_t ms) {
    const auto total_s = ms / 1000;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld:%02lld:%02lld", static_cast<long long>(total_s / 3600),
                  static_cast<long long>(total_s / 60 % 60), static_cast<long long>(total_s % 60));
    return buf;
}

/// Two-column statistics table for terminal output.
inline std::string format_stats(const DescriptiveStats& s) {
    std::vector<std::pair<std::string, std::string>> rows{
        {"Characters", std::to_string(s.total_characters)},
        {"Words", std::to_string(s.total_words)},
        {"Sentences", std::to_string(s.total_sentences)},
        {"Paragraphs", std::to_string(s.total_paragraphs)},
        {"Lines", std::to_string(s.total_lines)},
        {"Characters added", std::to_string(s.chars_added)},
        {"Characters removed", std::to_string(s.chars_removed)},
        {"Total time", format_duration(s.elapsed_ms)},
        {"Active time", format_duration(s.active_ms)},
    };
    char speed[32];
    std::snprintf(speed, sizeof speed, "%.2f", s.avg_chars_per_minute);
    rows.emplace_back("Typing speed (chars/min)", speed);

    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.first.size());
    std::string out;
    for (const auto& [k, v] : rows) {
        out += k;
        out.append(width - k.size() + 2, ' ');
        out += v;
        out += '\n';
    }
    return out;
}

} // namespace procfeed
