#include "wikicite/text_util.hpp"

#include <cstdio>
#include <fstream>

#include "wikicite/errors.hpp"

namespace wikicite {

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ascii_space(s[b])) b++;
    while (e > b && is_ascii_space(s[e - 1])) e--;
    return s.substr(b, e - b);
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_run = false;
    for (char c : trim(s)) {
        if (is_ascii_space(c)) {
            in_run = true;
            continue;
        }
        if (in_run) {
            out.push_back(' ');
            in_run = false;
        }
        out.push_back(c);
    }
    return out;
}

std::string fold_case(std::string_view s) {
    std::string out(s);
    for (std::size_t i = 0; i < out.size(); i++) {
        unsigned char c = static_cast<unsigned char>(out[i]);
        if (c >= 'A' && c <= 'Z') {
            out[i] = static_cast<char>(c + 0x20);
        } else if (c == 0xC3 && i + 1 < out.size()) {
            // Latin-1 uppercase block U+00C0..U+00DE, minus the times sign.
            unsigned char d = static_cast<unsigned char>(out[i + 1]);
            if (d >= 0x80 && d <= 0x9E && d != 0x97) out[i + 1] = static_cast<char>(d + 0x20);
            i++;
        }
    }
    return out;
}

std::string clean_journal_name(std::string_view s) {
    std::string out = collapse_whitespace(s);
    if (!out.empty() && out.back() == '.') {
        out.pop_back();
        while (!out.empty() && is_ascii_space(out.back())) out.pop_back();
    }
    return out;
}

std::string journal_match_key(std::string_view s) {
    return fold_case(clean_journal_name(s));
}

std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string xml_escape(std::string_view s) { return html_escape(s); }

std::string csv_field(std::string_view s) {
    bool needs_quotes = s.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(path.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    }
    return h;
}

namespace {
constexpr const char kReplacement[] = "\xEF\xBF\xBD";  // U+FFFD
}

void Utf8Sanitizer::start_byte(unsigned char c, std::string& out) {
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
        return;
    }
    lo_ = 0x80;
    hi_ = 0xBF;
    if (c >= 0xC2 && c <= 0xDF) {
        need_ = 1;
    } else if (c == 0xE0) {
        need_ = 2;
        lo_ = 0xA0;
    } else if (c >= 0xE1 && c <= 0xEC) {
        need_ = 2;
    } else if (c == 0xED) {
        need_ = 2;
        hi_ = 0x9F;
    } else if (c >= 0xEE && c <= 0xEF) {
        need_ = 2;
    } else if (c == 0xF0) {
        need_ = 3;
        lo_ = 0x90;
    } else if (c >= 0xF1 && c <= 0xF3) {
        need_ = 3;
    } else if (c == 0xF4) {
        need_ = 3;
        hi_ = 0x8F;
    } else {
        out += kReplacement;
        replacements_++;
        return;
    }
    pending_[0] = c;
    pending_len_ = 1;
}

void Utf8Sanitizer::feed(std::string_view in, std::string& out) {
    for (std::size_t i = 0; i < in.size(); i++) {
        unsigned char c = static_cast<unsigned char>(in[i]);
        if (pending_len_ == 0) {
            start_byte(c, out);
            continue;
        }
        if (c >= lo_ && c <= hi_) {
            pending_[pending_len_++] = c;
            lo_ = 0x80;
            hi_ = 0xBF;
            if (pending_len_ == need_ + 1) {
                out.append(reinterpret_cast<const char*>(pending_), pending_len_);
                pending_len_ = 0;
                need_ = 0;
            }
        } else {
            // Bad continuation: replace the partial sequence, then retry
            // this byte as the start of a new one.
            out += kReplacement;
            replacements_++;
            pending_len_ = 0;
            need_ = 0;
            start_byte(c, out);
        }
    }
}

void Utf8Sanitizer::finish(std::string& out) {
    if (pending_len_ > 0) {
        out += kReplacement;
        replacements_++;
        pending_len_ = 0;
        need_ = 0;
    }
}

}  // namespace wikicite
