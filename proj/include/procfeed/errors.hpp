#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace procfeed {

enum class ErrorCode {
    EmptyHistory,
    DuplicateTimestamp,
    MalformedSession,
    EmptyPassage,
    IndexOutOfRange,
    EmptyPasscode,
    WrongPasscodeOrTampered,
    MalformedContainer,
    FileNotFound,
    WriteFailure,
    CommandNotFound,
    PortInUse,
    Io,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorCode::MalformedSession: return "MalformedSession";
    case ErrorCode::EmptyPassage: return "EmptyPassage";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyPasscode: return "EmptyPasscode";
    case ErrorCode::WrongPasscodeOrTampered: return "WrongPasscodeOrTampered";
    case ErrorCode::MalformedContainer: return "MalformedContainer";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::WriteFailure: return "WriteFailure";
    case ErrorCode::CommandNotFound: return "CommandNotFound";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace procfeed
