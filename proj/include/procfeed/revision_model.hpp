#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace procfeed {

/// Milliseconds since the Unix epoch.
using TimestampMs = std::int64_t;

enum class SessionKind { text, code };

inline const char* to_string(SessionKind kind) { return kind == SessionKind::text ? "text" : "code"; }

inline std::optional<SessionKind> parse_session_kind(std::string_view s) {
    if (s == "text") return SessionKind::text;
    if (s == "code") return SessionKind::code;
    return std::nullopt;
}

/// Full document content at one point in time (never a delta).
struct Snapshot {
    TimestampMs t = 0;
    std::string content;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct ExecutionEvent {
    TimestampMs t = 0;
    bool success = false;
    std::string detail;

    friend bool operator==(const ExecutionEvent&, const ExecutionEvent&) = default;
};

inline constexpr std::int64_t kDefaultCaptureIntervalMs = 5000;
inline constexpr std::int64_t kDefaultIdleGapMs = 60000;

struct RevisionHistory {
    SessionKind kind = SessionKind::text;
    std::vector<Snapshot> snapshots;
    std::vector<ExecutionEvent> executions;
    std::int64_t capture_interval_ms = kDefaultCaptureIntervalMs;

    TimestampMs first_t() const { return snapshots.front().t; }
    TimestampMs last_t() const { return snapshots.back().t; }
    TimestampMs elapsed_ms() const { return snapshots.empty() ? 0 : last_t() - first_t(); }

    friend bool operator==(const RevisionHistory&, const RevisionHistory&) = default;
};

/// Normalizes candidate session data: sorts snapshots and executions by time,
/// collapses runs of identical content onto their earliest snapshot and drops
/// executions that fall outside the snapshot time range. Dropped executions
/// are reported through `warnings` when provided.
inline RevisionHistory validate_history(RevisionHistory raw, std::vector<std::string>* warnings = nullptr) {
    if (raw.snapshots.empty()) throw Error(ErrorCode::EmptyHistory, "session contains no snapshots");

    std::stable_sort(raw.snapshots.begin(), raw.snapshots.end(),
                     [](const Snapshot& a, const Snapshot& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < raw.snapshots.size(); ++i) {
        if (raw.snapshots[i].t == raw.snapshots[i - 1].t) {
            throw Error(ErrorCode::DuplicateTimestamp,
                        "two snapshots share timestamp " + std::to_string(raw.snapshots[i].t));
        }
    }

    RevisionHistory out;
    out.kind = raw.kind;
    out.capture_interval_ms = raw.capture_interval_ms;
    out.snapshots.reserve(raw.snapshots.size());
    for (auto& s : raw.snapshots) {
        if (!out.snapshots.empty() && out.snapshots.back().content == s.content) continue;
        out.snapshots.push_back(std::move(s));
    }

    std::stable_sort(raw.executions.begin(), raw.executions.end(),
                     [](const ExecutionEvent& a, const ExecutionEvent& b) { return a.t < b.t; });
    const TimestampMs lo = out.first_t();
    const TimestampMs hi = out.last_t();
    for (auto& e : raw.executions) {
        if (e.t < lo || e.t > hi) {
            if (warnings) {
                warnings->push_back("execution at t=" + std::to_string(e.t) + " lies outside [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "]; dropped");
            }
            continue;
        }
        out.executions.push_back(std::move(e));
    }
    return out;
}

struct ActiveSpan {
    TimestampMs start = 0;
    TimestampMs end = 0;

    TimestampMs length() const { return end - start; }
    friend bool operator==(const ActiveSpan&, const ActiveSpan&) = default;
};

/// Active portions of a session timeline. Each span is one inter-snapshot gap
/// no longer than the idle threshold; adjacent active gaps are merged.
struct TimelineSegmentation {
    std::vector<ActiveSpan> active_spans;
    std::int64_t idle_gap_threshold_ms = kDefaultIdleGapMs;
    TimestampMs total_elapsed_ms = 0;

    TimestampMs total_active_ms() const {
        TimestampMs total = 0;
        for (const auto& s : active_spans) total += s.length();
        return total;
    }

    /// True when the gap ending at `t` (between two consecutive snapshots)
    /// counted as active time.
    bool is_active_gap(TimestampMs start, TimestampMs end) const {
        for (const auto& s : active_spans) {
            if (start >= s.start && end <= s.end) return true;
        }
        return false;
    }
};

inline bool is_idle_gap(TimestampMs gap, std::int64_t idle_gap_threshold_ms) {
    return gap > idle_gap_threshold_ms;
}

inline TimelineSegmentation segment_timeline(const RevisionHistory& h, std::int64_t idle_gap_threshold_ms) {
    TimelineSegmentation seg;
    seg.idle_gap_threshold_ms = idle_gap_threshold_ms;
    seg.total_elapsed_ms = h.elapsed_ms();
    for (std::size_t i = 1; i < h.snapshots.size(); ++i) {
        const TimestampMs a = h.snapshots[i - 1].t;
        const TimestampMs b = h.snapshots[i].t;
        if (is_idle_gap(b - a, idle_gap_threshold_ms)) continue;
        if (!seg.active_spans.empty() && seg.active_spans.back().end == a) {
            seg.active_spans.back().end = b;
        } else {
            seg.active_spans.push_back({a, b});
        }
    }
    return seg;
}

} // namespace procfeed
