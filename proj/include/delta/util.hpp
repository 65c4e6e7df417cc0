#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace delta {

// ASCII whitespace trim. Input may be arbitrary bytes; multi-byte UTF-8
// sequences never contain ASCII whitespace bytes, so this is UTF-8 safe.
std::string_view trim_view(std::string_view s);
std::string trim(std::string_view s);

// Splits on '\n', dropping a trailing '\r' per line. Keeps empty lines.
std::vector<std::string> split_lines(std::string_view text);

// Joins with a separator.
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Case-insensitive (ASCII only) substring search; returns npos if absent.
std::size_t ifind_ascii(std::string_view haystack, std::string_view needle);

// FNV-1a 64-bit, used for stable config hashes.
std::uint64_t fnv1a64(std::string_view data);
std::string to_hex(std::uint64_t value);

// Writes "warning: ..." to stderr. Kept as a function so tests can silence it.
void log_warning(const std::string& message);
void set_log_quiet(bool quiet);

// Whole-file IO; throws input_error with the path on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
// Write to <path>.tmp then rename, so readers never see a partial file.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace delta
