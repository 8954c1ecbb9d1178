#include "wikicite/wikitext.hpp"

#include <algorithm>
#include <cstddef>

#include "wikicite/text_util.hpp"

namespace wikicite {

namespace {

// Parameter text under construction. eq marks the first '=' seen directly
// at this template's level (not inside a link or a nested template).
struct Piece {
    std::string text;
    std::size_t eq = std::string::npos;
};

struct Frame {
    std::size_t start = 0;
    int link_depth = 0;
    std::vector<Piece> pieces;  // pieces[0] is the template name

    Frame(std::size_t s) : start(s) { pieces.emplace_back(); }

    void put(char c, bool direct) {
        Piece& p = pieces.back();
        if (direct && c == '=' && link_depth == 0 && p.eq == std::string::npos &&
            pieces.size() > 1)
            p.eq = p.text.size();
        p.text.push_back(c);
    }

    void put(std::string_view chunk) {
        pieces.back().text.append(chunk);
    }
};

TemplateInstance finish_frame(Frame& f, std::size_t end) {
    TemplateInstance t;
    t.span_begin = f.start;
    t.span_end = end;
    t.name = std::string(trim(f.pieces[0].text));
    for (std::size_t i = 1; i < f.pieces.size(); ++i) {
        Piece& p = f.pieces[i];
        TemplateParam param;
        if (p.eq != std::string::npos) {
            std::string_view key = trim(std::string_view(p.text).substr(0, p.eq));
            if (!key.empty()) {
                param.key = std::string(key);
                param.value = std::string(trim(std::string_view(p.text).substr(p.eq + 1)));
                t.params.push_back(std::move(param));
                continue;
            }
        }
        param.value = std::move(p.text);
        t.params.push_back(std::move(param));
    }
    return t;
}

bool is_cite_journal(std::string_view name) {
    return fold_case(collapse_whitespace(name)) == "cite journal";
}

bool ieq(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        char x = a[i], y = b[i];
        if (x >= 'A' && x <= 'Z') x += 32;
        if (y >= 'A' && y <= 'Z') y += 32;
        if (x != y) return false;
    }
    return true;
}

struct RefRegion {
    std::size_t begin = 0;  // offset of '<'
    std::size_t end = 0;    // one past the closing tag
    std::string name;       // empty for unnamed refs
};

// Pulls the value of the name attribute out of a <ref ...> tag body.
std::string ref_name_attr(std::string_view tag) {
    std::size_t i = 0;
    while (i < tag.size()) {
        while (i < tag.size() && is_ascii_space(tag[i])) ++i;
        std::size_t word = i;
        while (i < tag.size() && !is_ascii_space(tag[i]) && tag[i] != '=') ++i;
        std::string_view attr = tag.substr(word, i - word);
        while (i < tag.size() && is_ascii_space(tag[i])) ++i;
        if (i >= tag.size() || tag[i] != '=') continue;
        ++i;
        while (i < tag.size() && is_ascii_space(tag[i])) ++i;
        std::string value;
        if (i < tag.size() && (tag[i] == '"' || tag[i] == '\'')) {
            char quote = tag[i++];
            std::size_t v = i;
            while (i < tag.size() && tag[i] != quote) ++i;
            value = std::string(tag.substr(v, i - v));
            if (i < tag.size()) ++i;
        } else {
            std::size_t v = i;
            while (i < tag.size() && !is_ascii_space(tag[i]) && tag[i] != '/' && tag[i] != '>')
                ++i;
            value = std::string(tag.substr(v, i - v));
        }
        if (ieq(attr, "name")) return value;
    }
    return std::string();
}

// Non-overlapping <ref>...</ref> regions, left to right. Self-closing refs
// produce no region. An unterminated ref runs to the end of the text.
std::vector<RefRegion> scan_ref_regions(std::string_view text, WikitextDiagnostics* diag) {
    std::vector<RefRegion> regions;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t open = text.find('<', pos);
        if (open == std::string_view::npos) break;
        std::string_view rest = text.substr(open);
        if (rest.size() < 4 || !ieq(rest.substr(0, 4), "<ref") ||
            (rest.size() > 4 && !is_ascii_space(rest[4]) && rest[4] != '>' && rest[4] != '/')) {
            pos = open + 1;
            continue;
        }
        // find the end of the opening tag, honouring quoted attribute values
        std::size_t i = open + 4;
        char quote = 0;
        bool self_closing = false;
        while (i < text.size()) {
            char c = text[i];
            if (quote) {
                if (c == quote) quote = 0;
            } else if (c == '"' || c == '\'') {
                quote = c;
            } else if (c == '>') {
                self_closing = i > open + 4 && text[i - 1] == '/';
                break;
            }
            ++i;
        }
        if (i >= text.size()) {  // '<ref' never closed, treat as plain text
            pos = open + 1;
            continue;
        }
        std::string name = ref_name_attr(text.substr(open + 4, i - (open + 4)));
        if (self_closing) {
            pos = i + 1;
            continue;
        }
        std::size_t body = i + 1;
        std::size_t close = body;
        std::size_t end;
        while (true) {
            close = text.find("</", close);
            if (close == std::string_view::npos) break;
            std::size_t j = close + 2;
            if (j + 3 <= text.size() && ieq(text.substr(j, 3), "ref")) {
                j += 3;
                while (j < text.size() && is_ascii_space(text[j])) ++j;
                if (j < text.size() && text[j] == '>') {
                    close = j + 1;
                    break;
                }
            }
            close += 2;
        }
        if (close == std::string_view::npos) {
            if (diag) diag->unterminated_refs++;
            end = text.size();
        } else {
            end = close;
        }
        regions.push_back(RefRegion{open, end, std::move(name)});
        pos = end;
    }
    return regions;
}

}  // namespace

std::optional<std::string_view> TemplateInstance::param(std::string_view key) const {
    std::optional<std::string_view> found;
    for (const TemplateParam& p : params)
        if (p.key && *p.key == key) found = p.value;
    return found;
}

std::vector<TemplateInstance> parse_templates(std::string_view wikitext,
                                              WikitextDiagnostics* diag) {
    std::vector<TemplateInstance> out;
    std::vector<Frame> stack;
    std::size_t i = 0;
    const std::size_t n = wikitext.size();
    while (i < n) {
        if (i + 1 < n && wikitext[i] == '{' && wikitext[i + 1] == '{') {
            stack.emplace_back(i);
            i += 2;
            continue;
        }
        if (i + 1 < n && wikitext[i] == '}' && wikitext[i + 1] == '}' && !stack.empty()) {
            Frame frame = std::move(stack.back());
            stack.pop_back();
            i += 2;
            out.push_back(finish_frame(frame, i));
            if (!stack.empty())
                stack.back().put(wikitext.substr(frame.start, i - frame.start));
            continue;
        }
        if (!stack.empty()) {
            Frame& top = stack.back();
            char c = wikitext[i];
            if (c == '|' && top.link_depth == 0) {
                top.pieces.emplace_back();
                ++i;
                continue;
            }
            if (i + 1 < n && c == '[' && wikitext[i + 1] == '[') {
                top.link_depth++;
                top.put('[', false);
                top.put('[', false);
                i += 2;
                continue;
            }
            if (i + 1 < n && c == ']' && wikitext[i + 1] == ']' && top.link_depth > 0) {
                top.link_depth--;
                top.put(']', false);
                top.put(']', false);
                i += 2;
                continue;
            }
            top.put(c, true);
        }
        ++i;
    }
    if (diag) diag->unbalanced_openers += stack.size();
    std::stable_sort(out.begin(), out.end(),
                     [](const TemplateInstance& a, const TemplateInstance& b) {
                         return a.span_begin < b.span_begin;
                     });
    return out;
}

std::vector<CitationInstance> extract_citations(const WikiPage& page,
                                                WikitextDiagnostics* diag) {
    std::vector<CitationInstance> out;
    if (page.ns != 0) {
        if (diag) diag->skipped_non_article_pages++;
        return out;
    }
    if (trim(page.title).empty()) {
        if (diag) diag->skipped_untitled_pages++;
        return out;
    }
    std::string text = strip_html_comments(page.wikitext);
    std::vector<TemplateInstance> templates = parse_templates(text, diag);
    std::vector<RefRegion> regions = scan_ref_regions(text, diag);

    std::vector<std::string> seen_keys;
    std::uint64_t anon = 0;
    std::size_t region_idx = 0;
    for (const TemplateInstance& t : templates) {
        if (!is_cite_journal(t.name)) continue;
        while (region_idx < regions.size() && regions[region_idx].end <= t.span_begin)
            ++region_idx;
        std::string key;
        if (region_idx < regions.size() && regions[region_idx].begin <= t.span_begin &&
            t.span_begin < regions[region_idx].end && !regions[region_idx].name.empty()) {
            key = "ref:" + regions[region_idx].name;
        } else {
            key = "anon:" + std::to_string(anon++);
        }
        if (std::find(seen_keys.begin(), seen_keys.end(), key) != seen_keys.end()) continue;
        seen_keys.push_back(key);
        CitationInstance c;
        c.article_title = page.title;
        if (auto journal = t.param("journal")) c.raw_journal = clean_field_value(*journal);
        c.dedup_key = std::move(key);
        out.push_back(std::move(c));
    }
    return out;
}

std::string clean_field_value(std::string_view value) {
    std::string_view v = trim(value);

    // [[target|label]] -> label, [[target]] -> target
    std::string linked;
    linked.reserve(v.size());
    std::size_t i = 0;
    while (i < v.size()) {
        if (i + 1 < v.size() && v[i] == '[' && v[i + 1] == '[') {
            std::size_t close = v.find("]]", i + 2);
            if (close != std::string_view::npos) {
                std::string_view inner = v.substr(i + 2, close - (i + 2));
                std::size_t pipe = inner.find('|');
                linked += pipe == std::string_view::npos ? inner : inner.substr(pipe + 1);
                i = close + 2;
                continue;
            }
        }
        linked.push_back(v[i++]);
    }

    // apostrophe runs: ''..''''' are markup, longer runs keep the excess
    std::string plain;
    plain.reserve(linked.size());
    i = 0;
    while (i < linked.size()) {
        if (linked[i] == '\'') {
            std::size_t run = 1;
            while (i + run < linked.size() && linked[i + run] == '\'') ++run;
            std::size_t keep = run == 1 ? 1 : run == 4 ? 1 : run > 5 ? run - 5 : 0;
            plain.append(keep, '\'');
            i += run;
            continue;
        }
        plain.push_back(linked[i++]);
    }

    std::string result = collapse_whitespace(plain);
    if (!result.empty() && result.back() == '.') result.pop_back();
    while (!result.empty() && is_ascii_space(result.back())) result.pop_back();
    return result;
}

std::string strip_html_comments(std::string_view wikitext) {
    std::string out;
    out.reserve(wikitext.size());
    std::size_t i = 0;
    while (i < wikitext.size()) {
        if (wikitext.compare(i, 4, "<!--") == 0) {
            std::size_t close = wikitext.find("-->", i + 4);
            if (close == std::string_view::npos) break;
            i = close + 3;
            continue;
        }
        out.push_back(wikitext[i++]);
    }
    return out;
}

}  // namespace wikicite
