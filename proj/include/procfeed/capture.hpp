#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "errors.hpp"
#include "revision_model.hpp"
#include "session_format.hpp"
#include "storage.hpp"

namespace procfeed {

using Clock = std::function<TimestampMs()>;

inline TimestampMs system_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

struct CaptureOptions {
    fs::path watched;
    SessionStore store;
    SessionKind kind = SessionKind::text;
    std::int64_t interval_ms = kDefaultCaptureIntervalMs;
};

/// Polls a watched file and records a snapshot whenever its content changes.
/// Every recorded snapshot is flushed before poll() returns: plaintext
/// sessions by appending one record, encrypted ones by an atomic rewrite.
class Capturer {
public:
    Capturer(CaptureOptions options, Clock clock = system_clock_ms)
        : options_(std::move(options))
        , clock_(std::move(clock)) {
        if (!fs::exists(options_.watched)) throw Error(ErrorCode::FileNotFound, options_.watched.string());
        if (options_.store.exists()) {
            history_ = options_.store.load_raw();
            if (history_.kind != options_.kind) {
                throw Error(ErrorCode::MalformedSession, "existing session has kind " +
                                                             std::string(to_string(history_.kind)));
            }
        } else {
            history_.kind = options_.kind;
            history_.capture_interval_ms = options_.interval_ms;
            if (!options_.store.encrypted()) {
                write_file_atomic(options_.store.path, session_header(history_.kind, history_.capture_interval_ms));
            }
        }
        for (const auto& s : history_.snapshots) {
            if (!last_ || s.t > last_->t) last_ = s;
        }
    }

    /// Reads the watched file once. Returns true when a snapshot was stored.
    bool poll() {
        std::string content;
        try {
            content = read_file(options_.watched);
        } catch (const Error&) {
            // Editors that save by rename leave the path briefly missing.
            return false;
        }
        const TimestampMs now = clock_();
        if (last_ && (last_->content == content || now <= last_->t)) return false;
        Snapshot snap{now, std::move(content)};
        flush(snap);
        last_ = std::move(snap);
        return true;
    }

    /// Polls until `stop` is set, sleeping `interval_ms` between polls.
    void run(const std::atomic<bool>& stop) {
        using namespace std::chrono;
        poll();
        while (!stop.load()) {
            const auto deadline = steady_clock::now() + milliseconds(options_.interval_ms);
            while (!stop.load() && steady_clock::now() < deadline) std::this_thread::sleep_for(milliseconds(50));
            if (stop.load()) break;
            poll();
        }
    }

    const RevisionHistory& history() const { return history_; }

private:
    void flush(const Snapshot& snap) {
        history_.snapshots.push_back(snap);
        if (!options_.store.encrypted()) {
            append_file(options_.store.path, session_record(snap));
            return;
        }
        // `run` may have added executions to the container since our last
        // write; keep them.
        if (options_.store.exists()) history_.executions = options_.store.load_raw().executions;
        options_.store.save(history_);
    }

    CaptureOptions options_;
    Clock clock_;
    RevisionHistory history_;
    std::optional<Snapshot> last_;
};

} // namespace procfeed
