// SPDX-FileCopyrightText: (c) 2026 The gcveval Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace gcv {

/// Lowercase hex SHA-256 digest of `data`.
std::string sha256_hex(std::string_view data);

std::string read_text_file(const std::filesystem::path& path);

/// Writes via a sibling temporary file, fsync, then rename into place, so a
/// reader never observes a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_shortest(double value);

/// Fixed-point rendering with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Current UTC time as ISO-8601, second resolution.
std::string utc_timestamp();

}  // namespace gcv
