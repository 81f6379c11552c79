#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "revision_model.hpp"
#include "secure_store.hpp"
#include "session_format.hpp"

namespace procfeed {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::error_code ec;
        if (!fs::exists(path, ec)) throw Error(ErrorCode::FileNotFound, path.string());
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    }
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path.string());
    return data;
}

/// Writes to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const fs::path& path, std::string_view data) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::WriteFailure, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::WriteFailure, "cannot replace " + path.string() + ": " + ec.message());
}

inline void append_file(const fs::path& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::WriteFailure, "cannot append to " + path.string());
}

inline bool is_encrypted_session(std::string_view data) {
    return secure::is_container(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()),
                                                               data.size()));
}

/// Session bytes after removing the encryption layer, if any. `passcode` is
/// only consulted for encrypted files.
template <class PasscodeFn>
std::string session_bytes(std::string data, PasscodeFn&& passcode) {
    if (!is_encrypted_session(data)) return data;
    const std::string code = passcode();
    const auto plain = secure::decrypt(
        std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()), code);
    return secure::to_string(plain);
}

/// Where and how a session file is stored.
struct SessionStore {
    fs::path path;
    /// Set for encrypted (`.pfb`) sessions.
    std::optional<std::string> passcode;
    std::uint32_t kdf_iterations = secure::kDefaultIterations;

    bool encrypted() const { return passcode.has_value(); }

    bool exists() const {
        std::error_code ec;
        return fs::exists(path, ec);
    }

    /// Loads without normalization (a live capture may still be open).
    RevisionHistory load_raw(std::vector<std::string>* warnings = nullptr) const {
        auto bytes = session_bytes(read_file(path), [&] {
            if (!passcode) throw Error(ErrorCode::WrongPasscodeOrTampered, "session is encrypted; passcode required");
            return *passcode;
        });
        return parse_session(bytes, warnings);
    }

    RevisionHistory load(std::vector<std::string>* warnings = nullptr) const {
        return validate_history(load_raw(warnings), warnings);
    }

    void save(const RevisionHistory& h) const {
        const auto text = serialize_session(h);
        if (encrypted()) {
            const auto sealed = secure::encrypt(text, *passcode, kdf_iterations);
            write_file_atomic(path, secure::to_string(sealed));
        } else {
            write_file_atomic(path, text);
        }
    }

    /// Adds an execution event. Plaintext sessions are appended to in place;
    /// encrypted ones are rewritten.
    void add_execution(const ExecutionEvent& e) const {
        if (!exists()) throw Error(ErrorCode::FileNotFound, path.string());
        if (!encrypted()) {
            const auto head = read_file(path).substr(0, secure::kMagic.size());
            if (is_encrypted_session(head)) {
                throw Error(ErrorCode::WrongPasscodeOrTampered, "session is encrypted; passcode required");
            }
            append_file(path, session_record(e));
            return;
        }
        auto h = load_raw();
        h.executions.push_back(e);
        save(h);
    }
};

} // namespace procfeed
