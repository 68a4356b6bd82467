// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace gcv {

struct ProcessResult {
    int exit_code = -1;  // 128 + signal number when the child was killed by a signal
    bool timed_out = false;
    std::string out;
    std::string err;
    double wall_seconds = 0.0;
};

/// Runs `command` through /bin/sh -c in its own process group, capturing both
/// output streams. On timeout the whole group receives SIGKILL.
ProcessResult run_shell_command(const std::string& command, std::chrono::milliseconds timeout);

/// Single-quotes `value` for /bin/sh.
std::string shell_quote(std::string_view value);

/// Last `max_lines` lines of `text`.
std::string tail_lines(std::string_view text, std::size_t max_lines);

}  // namespace gcv
