#pragma once

#include <charconv>
#include <optional>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "revision_model.hpp"

namespace procfeed {

// Plaintext session file layout (all line breaks are a single '\n'):
//
//   procfeed-session 1
//   kind <text|code>
//   interval <ms>
//   snapshot <t> <byte length>
//   <content bytes>
//   exec <t> <0|1> <byte length>
//   <detail bytes>
//
// Every payload is followed by one '\n' that is not part of the payload.
// Records may appear in any order (capture and `run` both append); the
// canonical form lists snapshots then executions, each sorted by time.

inline constexpr std::string_view kSessionMagic = "procfeed-session 1";

inline std::string session_header(SessionKind kind, std::int64_t interval_ms) {
    std::string out(kSessionMagic);
    out += "\nkind ";
    out += to_string(kind);
    out += "\ninterval ";
    out += std::to_string(interval_ms);
    out += '\n';
    return out;
}

inline std::string session_record(const Snapshot& s) {
    std::string out = "snapshot " + std::to_string(s.t) + ' ' + std::to_string(s.content.size()) + '\n';
    out += s.content;
    out += '\n';
    return out;
}

inline std::string session_record(const ExecutionEvent& e) {
    std::string out = "exec " + std::to_string(e.t) + ' ' + (e.success ? "1" : "0") + ' ' +
                      std::to_string(e.detail.size()) + '\n';
    out += e.detail;
    out += '\n';
    return out;
}

inline std::string serialize_session(const RevisionHistory& h) {
    std::string out = session_header(h.kind, h.capture_interval_ms);
    for (const auto& s : h.snapshots) out += session_record(s);
    for (const auto& e : h.executions) out += session_record(e);
    return out;
}

namespace detail {

class SessionReader {
public:
    explicit SessionReader(std::string_view data) : data_(data) {}

    bool at_end() const { return pos_ >= data_.size(); }

    /// Next '\n'-terminated line, or nullopt if the data ends first.
    std::optional<std::string_view> line() {
        const auto nl = data_.find('\n', pos_);
        if (nl == std::string_view::npos) return std::nullopt;
        auto out = data_.substr(pos_, nl - pos_);
        pos_ = nl + 1;
        return out;
    }

    enum class Payload { ok, truncated, bad_terminator };

    Payload payload(std::size_t n, std::string_view& out) {
        if (data_.size() - pos_ < n + 1 || n + 1 == 0) return Payload::truncated;
        if (data_[pos_ + n] != '\n') return Payload::bad_terminator;
        out = data_.substr(pos_, n);
        pos_ += n + 1;
        return Payload::ok;
    }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
};

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i <= line.size()) {
        const auto sp = line.find(' ', i);
        const auto end = sp == std::string_view::npos ? line.size() : sp;
        out.push_back(line.substr(i, end - i));
        i = end + 1;
    }
    return out;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] inline void malformed(const std::string& why) { throw Error(ErrorCode::MalformedSession, why); }

} // namespace detail

/// Parses session bytes without normalizing them. A truncated final record
/// (an interrupted append) is dropped with a warning; any other damage is
/// MalformedSession.
inline RevisionHistory parse_session(std::string_view data, std::vector<std::string>* warnings = nullptr) {
    using namespace detail;
    SessionReader in(data);
    RevisionHistory h;

    auto magic = in.line();
    if (!magic || *magic != kSessionMagic) malformed("missing session header");

    auto kind_line = in.line();
    if (!kind_line) malformed("missing kind line");
    auto kf = split_fields(*kind_line);
    if (kf.size() != 2 || kf[0] != "kind") malformed("bad kind line");
    auto kind = parse_session_kind(kf[1]);
    if (!kind) malformed("unknown session kind '" + std::string(kf[1]) + "'");
    h.kind = *kind;

    auto interval_line = in.line();
    if (!interval_line) malformed("missing interval line");
    auto inf = split_fields(*interval_line);
    if (inf.size() != 2 || inf[0] != "interval" || !parse_int(inf[1], h.capture_interval_ms) ||
        h.capture_interval_ms <= 0) {
        malformed("bad interval line");
    }

    auto truncated = [&](const char* what) {
        if (warnings) warnings->push_back(std::string("truncated trailing ") + what + " record dropped");
    };

    while (!in.at_end()) {
        auto header = in.line();
        if (!header) {
            truncated("record header");
            break;
        }
        auto f = split_fields(*header);
        if (f[0] == "snapshot") {
            Snapshot s;
            std::size_t n = 0;
            if (f.size() != 3 || !parse_int(f[1], s.t) || !parse_int(f[2], n)) malformed("bad snapshot header");
            std::string_view body;
            const auto status = in.payload(n, body);
            if (status == SessionReader::Payload::truncated) {
                truncated("snapshot");
                break;
            }
            if (status == SessionReader::Payload::bad_terminator) malformed("snapshot payload length mismatch");
            s.content = std::string(body);
            h.snapshots.push_back(std::move(s));
        } else if (f[0] == "exec") {
            ExecutionEvent e;
            int ok = 0;
            std::size_t n = 0;
            if (f.size() != 4 || !parse_int(f[1], e.t) || !parse_int(f[2], ok) || (ok != 0 && ok != 1) ||
                !parse_int(f[3], n)) {
                malformed("bad exec header");
            }
            e.success = ok == 1;
            std::string_view body;
            const auto status = in.payload(n, body);
            if (status == SessionReader::Payload::truncated) {
                truncated("exec");
                break;
            }
            if (status == SessionReader::Payload::bad_terminator) malformed("exec payload length mismatch");
            e.detail = std::string(body);
            h.executions.push_back(std::move(e));
        } else {
            malformed("unknown record type '" + std::string(f[0]) + "'");
        }
    }
    return h;
}

/// parse_session followed by validate_history.
inline RevisionHistory load_session(std::string_view data, std::vector<std::string>* warnings = nullptr) {
    return validate_history(parse_session(data, warnings), warnings);
}

} // namespace procfeed
