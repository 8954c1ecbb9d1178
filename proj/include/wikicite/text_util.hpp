#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace wikicite {

bool is_ascii_space(char c);

std::string_view trim(std::string_view s);

/// Trims and collapses every run of ASCII whitespace to a single space.
std::string collapse_whitespace(std::string_view s);

/// Lowercases ASCII letters and the Latin-1 uppercase block (UTF-8 aware).
/// Other code points pass through unchanged.
std::string fold_case(std::string_view s);

/// Cleaning applied to journal names before they become column identities:
/// trim, collapse whitespace, strip a single trailing period. Keeps case.
std::string clean_journal_name(std::string_view s);

/// Case-folded form of clean_journal_name; the lexicon lookup key.
std::string journal_match_key(std::string_view s);

std::string html_escape(std::string_view s);
std::string xml_escape(std::string_view s);

/// RFC-4180 field quoting: wraps in quotes when the field contains a
/// comma, quote or newline, doubling embedded quotes.
std::string csv_field(std::string_view s);

/// Fixed-point formatting ("%.*f"); locale independent.
std::string format_fixed(double v, int digits);

/// 64-bit FNV-1a, used for stage fingerprints.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

/// Streaming UTF-8 validator. Invalid sequences are replaced with U+FFFD
/// and counted; sequences split across feed() calls are handled.
class Utf8Sanitizer {
public:
    /// Appends the sanitized form of `in` to `out`.
    void feed(std::string_view in, std::string& out);
    /// Flushes a trailing incomplete sequence as a replacement character.
    void finish(std::string& out);
    std::uint64_t replacements() const noexcept { return replacements_; }

private:
    void start_byte(unsigned char c, std::string& out);

    unsigned char pending_[4] = {0, 0, 0, 0};
    int pending_len_ = 0;
    int need_ = 0;
    unsigned char lo_ = 0x80, hi_ = 0xBF;  // bounds for the next continuation byte
    std::uint64_t replacements_ = 0;
};

}  // namespace wikicite
