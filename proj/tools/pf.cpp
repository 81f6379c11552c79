// pf: capture, analyze and serve process-feedback sessions.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <termios.h>
#include <unistd.h>

#include <CLI11.hpp>

#include "procfeed/capture.hpp"
#include "procfeed/execute.hpp"
#include "procfeed/procfeed.hpp"
#include "procfeed/server.hpp"

namespace {

using namespace procfeed;

// Exit codes.
constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kUsageError = 2;
constexpr int kAuthError = 3;
constexpr int kMalformedSession = 4;

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptyHistory:
    case ErrorCode::DuplicateTimestamp:
    case ErrorCode::MalformedSession:
    case ErrorCode::EmptyPassage:
        return kMalformedSession;
    case ErrorCode::WrongPasscodeOrTampered:
    case ErrorCode::MalformedContainer:
        return kAuthError;
    case ErrorCode::EmptyPasscode:
    case ErrorCode::IndexOutOfRange:
        return kUsageError;
    case ErrorCode::FileNotFound:
    case ErrorCode::WriteFailure:
    case ErrorCode::CommandNotFound:
    case ErrorCode::PortInUse:
    case ErrorCode::Io:
        return kIoError;
    }
    return kIoError;
}

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

std::string prompt_passcode(const std::string& prompt) {
    if (!isatty(STDIN_FILENO)) {
        throw Error(ErrorCode::Io, "no terminal to prompt for a passcode; use --passcode-env with PF_PASSCODE");
    }
    std::cerr << prompt << std::flush;
    termios old{};
    tcgetattr(STDIN_FILENO, &old);
    termios quiet = old;
    quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
    tcsetattr(STDIN_FILENO, TCSANOW, &quiet);
    std::string code;
    std::getline(std::cin, code);
    tcsetattr(STDIN_FILENO, TCSANOW, &old);
    std::cerr << '\n';
    return code;
}

std::string obtain_passcode(bool from_env) {
    if (from_env) {
        const char* v = std::getenv("PF_PASSCODE");
        if (!v) throw Error(ErrorCode::EmptyPasscode, "PF_PASSCODE is not set");
        if (!*v) throw Error(ErrorCode::EmptyPasscode, "PF_PASSCODE is empty");
        return v;
    }
    auto code = prompt_passcode("Passcode: ");
    if (code.empty()) throw Error(ErrorCode::EmptyPasscode, "passcode must not be empty");
    return code;
}

/// Expands \t \n \r \s (space) and \\ in delimiter flags.
std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            out += s[i];
            continue;
        }
        switch (s[++i]) {
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 's': out += ' '; break;
        case '\\': out += '\\'; break;
        default:
            out += '\\';
            out += s[i];
        }
    }
    return out;
}

bool file_is_encrypted(const fs::path& p) {
    std::error_code ec;
    if (!fs::exists(p, ec)) return false;
    return is_encrypted_session(read_file(p).substr(0, secure::kMagic.size()));
}

SessionStore open_store(const fs::path& path, bool passcode_env, bool force_encrypted = false) {
    SessionStore store{path, std::nullopt};
    if (force_encrypted || file_is_encrypted(path)) store.passcode = obtain_passcode(passcode_env);
    return store;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct CaptureArgs {
    std::string file;
    std::string out;
    std::string kind = "text";
    std::int64_t interval_ms = kDefaultCaptureIntervalMs;
    bool encrypt = false;
    bool passcode_env = false;
};

int cmd_capture(const CaptureArgs& a) {
    const fs::path out(a.out);
    const bool encrypted = a.encrypt || out.extension() == ".pfb" || file_is_encrypted(out);
    CaptureOptions opt;
    opt.watched = a.file;
    opt.kind = *parse_session_kind(a.kind);
    opt.interval_ms = a.interval_ms;
    if (!fs::exists(opt.watched)) throw Error(ErrorCode::FileNotFound, a.file);
    opt.store = open_store(out, a.passcode_env, encrypted);

    Capturer capturer(std::move(opt));
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "capturing " << a.file << " every " << a.interval_ms << " ms into " << a.out
              << " (Ctrl-C to stop)\n";
    capturer.run(g_stop);
    std::cerr << "stopped; " << capturer.history().snapshots.size() << " snapshot(s) recorded\n";
    return kOk;
}

struct RunArgs {
    std::string session;
    bool passcode_env = false;
    std::vector<std::string> command;
};

int cmd_run(const RunArgs& a) {
    const auto store = open_store(a.session, a.passcode_env);
    if (!store.exists()) throw Error(ErrorCode::FileNotFound, a.session);
    const TimestampMs t = system_clock_ms();
    const auto result = run_command(a.command);
    store.add_execution({t, result.success(), result.first_error_line});
    std::cerr << "recorded " << (result.success() ? "successful" : "failed") << " execution (exit "
              << result.exit_code << ")\n";
    return kOk;
}

struct AnalyzeArgs {
    std::string session;
    std::string out;
    bool passcode_env = false;
    int ngram_n = kDefaultNgramN;
    double threshold = kDefaultThreshold;
    std::int64_t idle_gap_ms = kDefaultIdleGapMs;
    std::size_t top_k = kDefaultTopK;
    std::optional<std::string> word_delims;
    std::optional<std::string> sentence_delims;
    std::string matching = "one_to_one";
};

int cmd_analyze(const AnalyzeArgs& a) {
    const auto store = open_store(a.session, a.passcode_env);
    std::vector<std::string> warnings;
    const auto history = store.load(&warnings);
    print_warnings(warnings);

    AnalysisOptions opt;
    opt.segmentation.ngram_n = a.ngram_n;
    if (a.word_delims) opt.segmentation.word_delimiters = SegmentationConfig::delimiter_set(unescape(*a.word_delims));
    if (a.sentence_delims) {
        opt.segmentation.sentence_delimiters = SegmentationConfig::delimiter_set(unescape(*a.sentence_delims));
    }
    opt.threshold = a.threshold;
    opt.idle_gap_ms = a.idle_gap_ms;
    opt.top_k = a.top_k;
    opt.rule = a.matching == "per_passage" ? MatchingRule::per_passage : MatchingRule::one_to_one;

    const auto bundle = build_bundle(history, opt);
    if (!a.out.empty()) write_file_atomic(a.out, serialize_bundle(bundle));
    std::cout << format_stats(bundle.stats);
    return kOk;
}

struct ServeArgs {
    std::string bundle;
    int port = 8080;
    std::optional<std::string> assets;
};

BundleServer* g_server = nullptr;

extern "C" void on_serve_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_serve(const ServeArgs& a) {
    std::optional<fs::path> assets;
    if (a.assets) assets = fs::path(*a.assets);
    BundleServer server(read_file(a.bundle), assets);
    const int port = server.bind("127.0.0.1", a.port);
    g_server = &server;
    std::signal(SIGINT, on_serve_signal);
    std::signal(SIGTERM, on_serve_signal);
    std::cerr << "serving " << a.bundle << " at http://127.0.0.1:" << port << "/\n";
    server.listen();
    g_server = nullptr;
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capture, analyze and serve writing/coding process sessions"};
    app.require_subcommand(1);

    CaptureArgs cap;
    auto* capture = app.add_subcommand("capture", "Poll a file and record timestamped snapshots");
    capture->add_option("--file", cap.file, "File to watch")->required();
    capture->add_option("--out", cap.out, "Session file to write (.pfb implies --encrypt)")->required();
    capture->add_option("--kind", cap.kind, "Session kind")->check(CLI::IsMember({"text", "code"}));
    capture->add_option("--interval-ms", cap.interval_ms, "Polling interval in milliseconds")
        ->check(CLI::Range(std::int64_t{500}, std::int64_t{86'400'000}));
    capture->add_flag("--encrypt", cap.encrypt, "Write an encrypted session");
    capture->add_flag("--passcode-env", cap.passcode_env, "Read the passcode from PF_PASSCODE");

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a command and record the execution in a session");
    run_cmd->add_option("--session", run.session, "Session file")->required();
    run_cmd->add_flag("--passcode-env", run.passcode_env, "Read the passcode from PF_PASSCODE");
    run_cmd->add_option("command", run.command, "Command to run (after --)")->required();

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Print statistics and write a pvbundle/1 document");
    analyze->add_option("--session", an.session, "Session file")->required();
    analyze->add_option("--out", an.out, "Bundle output path");
    analyze->add_flag("--passcode-env", an.passcode_env, "Read the passcode from PF_PASSCODE");
    analyze->add_option("--ngram-n", an.ngram_n, "Character n-gram size")->check(CLI::Range(1, 64));
    analyze->add_option("--threshold", an.threshold, "Passage similarity threshold")->check(CLI::Range(0.0, 1.0));
    analyze->add_option("--idle-gap-ms", an.idle_gap_ms, "Gaps longer than this are idle time")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--top-k", an.top_k, "Number of words in the frequency chart")->check(CLI::PositiveNumber);
    analyze->add_option("--word-delims", an.word_delims, "Word delimiter characters (\\s \\t \\n escapes)");
    analyze->add_option("--sentence-delims", an.sentence_delims, "Sentence delimiter characters");
    analyze->add_option("--matching", an.matching, "Passage matching rule")
        ->check(CLI::IsMember({"one_to_one", "per_passage"}));

    ServeArgs sv;
    auto* serve = app.add_subcommand("serve", "Serve a bundle and the viewer on the loopback interface");
    serve->add_option("--bundle", sv.bundle, "Bundle file")->required();
    serve->add_option("--port", sv.port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve->add_option("--assets", sv.assets, "Directory of viewer assets")->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsageError;
    }

    try {
        if (an.word_delims && unescape(*an.word_delims).empty()) throw CLI::ValidationError("--word-delims", "empty");
        if (an.sentence_delims && unescape(*an.sentence_delims).empty()) {
            throw CLI::ValidationError("--sentence-delims", "empty");
        }
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n' << app.help();
        return kUsageError;
    }

    try {
        if (*capture) return cmd_capture(cap);
        if (*run_cmd) return cmd_run(run);
        if (*analyze) return cmd_analyze(an);
        if (*serve) return cmd_serve(sv);
    } catch (const Error& e) {
        std::cerr << "pf: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "pf: " << e.what() << '\n';
        return kIoError;
    }
    return kUsageError;
}
