#pragma once

#include <cerrno>
#include <cstring>
#include <string>
#include <vector>

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "errors.hpp"

extern char** environ;

namespace procfeed {

struct CommandResult {
    int exit_code = 0;
    /// First non-empty line the command wrote to standard error.
    std::string first_error_line;

    bool success() const { return exit_code == 0; }
};

/// Runs `argv` (looked up on PATH), passing standard output through and
/// teeing standard error to ours while capturing it.
inline CommandResult run_command(const std::vector<std::string>& argv) {
    if (argv.empty()) throw Error(ErrorCode::CommandNotFound, "no command given");

    int pipe_fds[2];
    if (pipe(pipe_fds) != 0) throw Error(ErrorCode::Io, std::string("pipe: ") + std::strerror(errno));

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, pipe_fds[1], STDERR_FILENO);
    posix_spawn_file_actions_addclose(&actions, pipe_fds[0]);
    posix_spawn_file_actions_addclose(&actions, pipe_fds[1]);

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_t pid = 0;
    const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(pipe_fds[1]);
    if (rc != 0) {
        close(pipe_fds[0]);
        if (rc == ENOENT || rc == EACCES || rc == ENOEXEC) {
            throw Error(ErrorCode::CommandNotFound, argv[0] + ": " + std::strerror(rc));
        }
        throw Error(ErrorCode::Io, "cannot start " + argv[0] + ": " + std::strerror(rc));
    }

    std::string err;
    char buf[4096];
    while (true) {
        const ssize_t n = read(pipe_fds[0], buf, sizeof buf);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        err.append(buf, static_cast<std::size_t>(n));
        [[maybe_unused]] auto w = write(STDERR_FILENO, buf, static_cast<std::size_t>(n));
    }
    close(pipe_fds[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) throw Error(ErrorCode::Io, std::string("waitpid: ") + std::strerror(errno));
    }

    CommandResult result;
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
    }
    std::size_t pos = 0;
    while (pos < err.size()) {
        auto nl = err.find('\n', pos);
        if (nl == std::string::npos) nl = err.size();
        if (nl > pos) {
            result.first_error_line = err.substr(pos, nl - pos);
            break;
        }
        pos = nl + 1;
    }
    return result;
}

} // namespace procfeed
