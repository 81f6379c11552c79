#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "diff.hpp"
#include "revision_model.hpp"
#include "segmentation.hpp"
#include "similarity.hpp"

namespace procfeed {

/// Opaque passage identity. Rendered as its decimal counter value.
struct PassageId {
    std::uint64_t value = 0;

    std::string str() const { return std::to_string(value); }
    friend auto operator<=>(const PassageId&, const PassageId&) = default;
};

struct PassageVersion {
    Passage passage;
    PassageId id;
    std::size_t snapshot_index = 0;

    friend bool operator==(const PassageVersion&, const PassageVersion&) = default;
};

inline constexpr double kDefaultThreshold = 0.5;

struct IdentityMatrix {
    std::vector<std::vector<PassageVersion>> snapshots;
    double threshold = kDefaultThreshold;
    Granularity granularity = Granularity::paragraph;

    friend bool operator==(const IdentityMatrix&, const IdentityMatrix&) = default;
};

/// How passages at time t are matched to passages at t+1.
enum class MatchingRule {
    /// All cross pairs ranked by similarity; each passage used at most once.
    one_to_one,
    /// Every passage at t independently takes its best match at t+1, so
    /// several passages may adopt the same identity.
    per_passage,
};

inline const char* to_string(MatchingRule r) { return r == MatchingRule::one_to_one ? "one_to_one" : "per_passage"; }

/// Gives every passage of every snapshot a distinct identity, numbered from 1
/// in snapshot then ordinal order.
inline IdentityMatrix assign_initial_ids(const std::vector<std::vector<Passage>>& snapshots,
                                         Granularity granularity = Granularity::paragraph) {
    IdentityMatrix m;
    m.granularity = granularity;
    std::uint64_t next = 1;
    m.snapshots.reserve(snapshots.size());
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        std::vector<PassageVersion> row;
        row.reserve(snapshots[i].size());
        for (const auto& p : snapshots[i]) row.push_back({p, PassageId{next++}, i});
        m.snapshots.push_back(std::move(row));
    }
    return m;
}

/// For each passage in `older`, the index of the passage in `newer` whose
/// identity it adopts, if any. A match requires similarity strictly above
/// `threshold`.
///
/// one_to_one: candidate pairs are taken by descending similarity, ties going
/// to the smaller ordinal in `newer` and then in `older`.
/// per_passage: the first passage in `newer` with the highest similarity.
inline std::vector<std::optional<std::size_t>> match_passages(const std::vector<Passage>& older,
                                                              const std::vector<Passage>& newer, int ngram_n,
                                                              double threshold,
                                                              MatchingRule rule = MatchingRule::one_to_one) {
    std::vector<std::optional<std::size_t>> match(older.size());
    if (older.empty() || newer.empty()) return match;

    auto profiles = [&](const std::vector<Passage>& ps) {
        std::vector<std::optional<NGramProfile>> out;
        out.reserve(ps.size());
        for (const auto& p : ps) {
            out.push_back(p.text.empty() ? std::nullopt : std::optional(NGramProfile::from_text(p.text, ngram_n)));
        }
        return out;
    };
    const auto po = profiles(older);
    const auto pn = profiles(newer);
    auto sim = [&](std::size_t i, std::size_t j) {
        // Empty passages (blank lines) only match each other.
        if (!po[i] || !pn[j]) return !po[i] && !pn[j] ? 1.0 : 0.0;
        return similarity(*po[i], *pn[j]);
    };

    if (rule == MatchingRule::per_passage) {
        for (std::size_t i = 0; i < older.size(); ++i) {
            double best = -1.0;
            std::optional<std::size_t> best_j;
            for (std::size_t j = 0; j < newer.size(); ++j) {
                const double s = sim(i, j);
                if (s > best) {
                    best = s;
                    best_j = j;
                }
            }
            if (best > threshold) match[i] = best_j;
        }
        return match;
    }

    struct Candidate {
        double score;
        std::size_t newer;
        std::size_t older;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(older.size() * newer.size());
    for (std::size_t i = 0; i < older.size(); ++i) {
        for (std::size_t j = 0; j < newer.size(); ++j) {
            const double s = sim(i, j);
            if (s > threshold) candidates.push_back({s, j, i});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return std::tie(a.newer, a.older) < std::tie(b.newer, b.older);
    });
    std::vector<bool> newer_used(newer.size(), false);
    for (const auto& c : candidates) {
        if (match[c.older] || newer_used[c.newer]) continue;
        match[c.older] = c.newer;
        newer_used[c.newer] = true;
    }
    return match;
}

/// Carries identities backward from the latest snapshot: for each adjacent
/// pair (t, t+1), starting with the last, matched passages at t adopt the
/// identity their partner at t+1 holds. Text and order are never changed.
inline IdentityMatrix propagate_ids(IdentityMatrix m, const SegmentationConfig& cfg, double threshold,
                                    MatchingRule rule = MatchingRule::one_to_one) {
    m.threshold = threshold;
    if (m.snapshots.size() < 2) return m;
    auto texts = [](const std::vector<PassageVersion>& row) {
        std::vector<Passage> out;
        out.reserve(row.size());
        for (const auto& pv : row) out.push_back(pv.passage);
        return out;
    };
    for (std::size_t t = m.snapshots.size() - 1; t-- > 0;) {
        auto& older = m.snapshots[t];
        const auto& newer = m.snapshots[t + 1];
        const auto match = match_passages(texts(older), texts(newer), cfg.ngram_n, threshold, rule);
        for (std::size_t i = 0; i < older.size(); ++i) {
            if (match[i]) older[i].id = newer[*match[i]].id;
        }
    }
    return m;
}

/// Line identities for code: lines on the common path of a line diff between
/// snapshots t and t+1 adopt the identity of their aligned line at t+1.
inline IdentityMatrix line_identities_from_diffs(const RevisionHistory& history) {
    std::vector<std::vector<Passage>> rows;
    rows.reserve(history.snapshots.size());
    for (const auto& s : history.snapshots) rows.push_back(split_lines(s.content));
    auto m = assign_initial_ids(rows, Granularity::line);
    m.threshold = 0.0;
    if (m.snapshots.size() < 2) return m;

    for (std::size_t t = m.snapshots.size() - 1; t-- > 0;) {
        auto& older = m.snapshots[t];
        const auto& newer = m.snapshots[t + 1];
        const auto script = diff_lines(history.snapshots[t].content, history.snapshots[t + 1].content);
        std::size_t i = 0;
        std::size_t j = 0;
        for (const auto& seg : script.segments) {
            const std::size_t n = seg.units.size();
            switch (seg.label) {
            case DiffLabel::common:
                for (std::size_t k = 0; k < n; ++k) older[i + k].id = newer[j + k].id;
                i += n;
                j += n;
                break;
            case DiffLabel::removed: i += n; break;
            case DiffLabel::added: j += n; break;
            }
        }
    }
    return m;
}

/// First snapshot index at which each identity appears.
inline std::map<PassageId, std::size_t> passage_origin_times(const IdentityMatrix& m) {
    std::map<PassageId, std::size_t> out;
    for (std::size_t i = 0; i < m.snapshots.size(); ++i) {
        for (const auto& pv : m.snapshots[i]) out.emplace(pv.id, i);
    }
    return out;
}

/// Segments every snapshot at `g`, assigns fresh identities and propagates
/// them. Line granularity uses the diff-based rule.
inline IdentityMatrix track_passages(const RevisionHistory& h, Granularity g, const SegmentationConfig& cfg,
                                     double threshold, MatchingRule rule = MatchingRule::one_to_one) {
    if (g == Granularity::line) return line_identities_from_diffs(h);
    std::vector<std::vector<Passage>> rows;
    rows.reserve(h.snapshots.size());
    for (const auto& s : h.snapshots) rows.push_back(split_passages(s.content, g, cfg));
    return propagate_ids(assign_initial_ids(rows, g), cfg, threshold, rule);
}

} // namespace procfeed
