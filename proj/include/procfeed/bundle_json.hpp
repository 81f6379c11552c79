#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "analytics.hpp"
#include "errors.hpp"

namespace procfeed {

inline constexpr std::string_view kBundleSchema = "pvbundle/1";

// nlohmann::json keeps object keys sorted, which fixes the key order of every
// emitted document.
using Json = nlohmann::json;

namespace detail {

inline std::string delimiter_string(const std::set<char32_t>& set) {
    std::string out;
    for (char32_t c : set) utf8::append(out, c);
    return out;
}

inline Json to_json(const WordCounts& words) {
    Json arr = Json::array();
    for (const auto& [w, c] : words) arr.push_back({{"word", w}, {"count", c}});
    return arr;
}

inline Json ids_json(const std::vector<PassageId>& ids) {
    Json arr = Json::array();
    for (const auto& id : ids) arr.push_back(id.str());
    return arr;
}

inline Json to_json(const LineDiff& script) {
    Json segs = Json::array();
    for (const auto& s : script.segments) segs.push_back({{"label", to_string(s.label)}, {"units", s.units}});
    return segs;
}

} // namespace detail

inline Json stats_json(const DescriptiveStats& s) {
    return {
        {"total_characters", s.total_characters},
        {"total_words", s.total_words},
        {"total_sentences", s.total_sentences},
        {"total_paragraphs", s.total_paragraphs},
        {"total_lines", s.total_lines},
        {"elapsed_ms", s.elapsed_ms},
        {"active_ms", s.active_ms},
        {"avg_chars_per_minute", s.avg_chars_per_minute},
        {"chars_added", s.chars_added},
        {"chars_removed", s.chars_removed},
    };
}

inline Json pair_diff_json(const PairDiff& d) {
    return {
        {"i", d.from},
        {"j", d.to},
        {"unit", to_string(d.script.unit)},
        {"segments", detail::to_json(d.script)},
        {"lines_added", d.script.count(DiffLabel::added)},
        {"lines_removed", d.script.count(DiffLabel::removed)},
        {"chars_added", d.chars.chars_added},
        {"chars_removed", d.chars.chars_removed},
    };
}

inline Json bundle_json(const PVBundle& b) {
    using detail::delimiter_string;
    const auto& h = b.history;
    const auto& o = b.options;

    Json config = {
        {"kind", to_string(h.kind)},
        {"capture_interval_ms", h.capture_interval_ms},
        {"ngram_n", o.segmentation.ngram_n},
        {"word_delimiters", delimiter_string(o.segmentation.word_delimiters)},
        {"sentence_delimiters", delimiter_string(o.segmentation.sentence_delimiters)},
        {"threshold", o.threshold},
        {"matching", to_string(o.rule)},
        {"idle_gap_ms", o.idle_gap_ms},
        {"top_k", o.top_k},
        {"typing_speed_rule", "characters added per minute of active time; steps across idle gaps report 0"},
    };

    Json snapshots = Json::array();
    for (const auto& s : h.snapshots) snapshots.push_back({{"t", s.t}, {"content", s.content}});

    Json pv1 = Json::array();
    for (const auto& f : b.pv1_frames) {
        Json spans = Json::array();
        for (const auto& sp : f.spans) spans.push_back({{"label", to_string(sp.label)}, {"text", sp.text}});
        pv1.push_back({{"index", f.index}, {"t", f.t}, {"spans", spans}});
    }

    Json pv2 = Json::array();
    for (const auto& chart : b.pv2_area) {
        Json series = Json::array();
        for (const auto& s : chart.series) {
            Json texts = Json::array();
            for (const auto& t : s.texts) texts.push_back(t ? Json(*t) : Json(nullptr));
            series.push_back({{"id", s.id.str()}, {"origin", s.origin}, {"sizes", s.sizes}, {"texts", texts}});
        }
        pv2.push_back({{"granularity", to_string(chart.granularity)}, {"series", series}});
    }

    Json pv3 = Json::array();
    for (const auto& chart : b.pv3_active) {
        Json order = Json::array();
        Json active = Json::array();
        for (const auto& ids : chart.order) order.push_back(detail::ids_json(ids));
        for (const auto& ids : chart.active) active.push_back(detail::ids_json(ids));
        pv3.push_back({{"granularity", to_string(chart.granularity)}, {"order", order}, {"active", active}});
    }

    Json pv6 = Json::array();
    for (const auto& p : b.pv6_series) {
        pv6.push_back({{"t", p.t}, {"doc_length", p.doc_length}, {"chars_per_minute", p.chars_per_minute}});
    }

    Json pv7 = Json::array();
    for (const auto& p : b.pv7_timeline) {
        pv7.push_back({{"t", p.t}, {"chars_added", p.chars_added}, {"chars_removed", p.chars_removed}});
    }

    Json pv8 = Json::array();
    for (const auto& e : b.pv8_executions) pv8.push_back({{"t", e.t}, {"success", e.success}, {"detail", e.detail}});

    return {
        {"schema", kBundleSchema},
        {"config", config},
        {"stats", stats_json(b.stats)},
        {"snapshots", snapshots},
        {"pv1_frames", pv1},
        {"pv2_area", pv2},
        {"pv3_active", pv3},
        {"pv4_words", {{"final", detail::to_json(b.pv4_words)}, {"removed", detail::to_json(b.pv4_removed_words)}}},
        {"pv5_heatmap", {{"sentences", b.pv5_heatmap.sentences}, {"matrix", b.pv5_heatmap.matrix}}},
        {"pv6_series", pv6},
        {"pv7_timeline", pv7},
        {"pv8_executions", pv8},
    };
}

/// Canonical document text: two-space indentation and a trailing newline.
inline std::string serialize_bundle(const PVBundle& b) {
    return bundle_json(b).dump(2, ' ', false, Json::error_handler_t::replace) + '\n';
}

/// Recovers the embedded revision history (snapshots and executions) from a
/// bundle document, which is all the diff endpoint needs.
inline RevisionHistory history_from_bundle(const Json& doc) {
    try {
        if (doc.at("schema").get<std::string>() != kBundleSchema) {
            throw Error(ErrorCode::MalformedSession, "unsupported bundle schema");
        }
        RevisionHistory h;
        const auto& cfg = doc.at("config");
        auto kind = parse_session_kind(cfg.at("kind").get<std::string>());
        if (!kind) throw Error(ErrorCode::MalformedSession, "bad session kind in bundle");
        h.kind = *kind;
        h.capture_interval_ms = cfg.at("capture_interval_ms").get<std::int64_t>();
        for (const auto& s : doc.at("snapshots")) {
            h.snapshots.push_back({s.at("t").get<TimestampMs>(), s.at("content").get<std::string>()});
        }
        for (const auto& e : doc.at("pv8_executions")) {
            h.executions.push_back(
                {e.at("t").get<TimestampMs>(), e.at("success").get<bool>(), e.at("detail").get<std::string>()});
        }
        return h;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::MalformedSession, std::string("bad bundle document: ") + e.what());
    }
}

} // namespace procfeed
