// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

namespace gcv::test {

namespace fs = std::filesystem;

inline const fs::path kToolDir{GCV_TOOL_DIR};
inline const fs::path kFixtureDir{GCV_FIXTURE_DIR};

/// Removed with its contents on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "gcvtest-XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const noexcept { return path_; }
    fs::path operator/(const fs::path& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Row-major (n+1) x (n+1) matrix with entries in [lo, hi).
inline std::vector<double> random_cells(std::mt19937_64& rng, std::size_t side, double lo = 0.05, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> out(side * side);
    for (auto& v : out) v = d(rng);
    return out;
}

inline std::vector<std::string> make_ids(std::size_t side) {
    std::vector<std::string> ids{"syn"};
    for (std::size_t i = 1; i < side; ++i) ids.push_back("ref" + std::to_string(i));
    return ids;
}

struct CommandOutput {
    int exit_code = -1;
    std::string out;
};

/// Runs through the shell; stdout only, stderr goes to the test log.
inline CommandOutput run_command(const std::string& cmd) {
    CommandOutput result;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) return result;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return result;
}

}  // namespace gcv::test
