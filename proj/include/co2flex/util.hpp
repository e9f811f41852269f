#pragma once

// Small shared utilities: canonical number formatting (shortest round-trip,
// used by every serializer so hashes and byte-reproducibility agree),
// FNV-1a hashing, and string helpers for the text-format parsers.

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace co2flex {

/// Parse error with file/line context.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& where, const std::string& what)
        : std::runtime_error(where + ": " + what) {}
};

namespace util {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view sv, const std::string& where) {
    double v = 0.0;
    auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (res.ec != std::errc() || res.ptr != sv.data() + sv.size())
        throw ParseError(where, "invalid number '" + std::string(sv) + "'");
    return v;
}

inline long parse_long(std::string_view sv, const std::string& where) {
    long v = 0;
    auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (res.ec != std::errc() || res.ptr != sv.data() + sv.size())
        throw ParseError(where, "invalid integer '" + std::string(sv) + "'");
    return v;
}

inline std::string_view trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// Split on whitespace runs.
inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

/// FNV-1a 64-bit, streamed.
class Fnv1a {
public:
    void update(std::string_view data) {
        for (unsigned char c : data) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
    }
    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s(16, '0');
        std::uint64_t v = state_;
        for (int i = 15; i >= 0; --i) { s[i] = digits[v & 0xF]; v >>= 4; }
        return s;
    }
private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string fnv1a_hex(std::string_view data) {
    Fnv1a h;
    h.update(data);
    return h.hex();
}

}  // namespace util
}  // namespace co2flex
