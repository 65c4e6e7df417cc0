#include "delta/util.hpp"

#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "delta/errors.hpp"

namespace delta {

namespace {
bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}
}  // namespace

std::string_view trim_view(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && is_ascii_space(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && is_ascii_space(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::string trim(std::string_view s) {
    return std::string(trim_view(s));
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) {
                std::string_view line = text.substr(start);
                if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
                lines.emplace_back(line);
            }
            break;
        }
        std::string_view line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = nl + 1;
    }
    return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

std::size_t ifind_ascii(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return 0;
    if (needle.size() > haystack.size()) return std::string_view::npos;
    auto lower = [](unsigned char c) { return static_cast<char>(std::tolower(c)); };
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        std::size_t j = 0;
        while (j < needle.size() &&
               lower(static_cast<unsigned char>(haystack[i + j])) ==
                   lower(static_cast<unsigned char>(needle[j]))) {
            ++j;
        }
        if (j == needle.size()) return i;
    }
    return std::string_view::npos;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf);
}

namespace {
std::atomic<bool> log_quiet{false};
}

void log_warning(const std::string& message) {
    if (!log_quiet.load()) std::fprintf(stderr, "warning: %s\n", message.c_str());
}

void set_log_quiet(bool quiet) {
    log_quiet.store(quiet);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw input_error("error reading file: " + path);
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot open file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw input_error("error writing file: " + path);
}

void write_file_atomic(const std::string& path, std::string_view content) {
    const std::string tmp = path + ".tmp";
    write_file(tmp, content);
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw input_error("cannot replace file: " + path);
    }
}

}  // namespace delta
