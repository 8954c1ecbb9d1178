#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikicite/dump_reader.hpp"

namespace wikicite {

struct TemplateParam {
    std::optional<std::string> key;  // absent for positional parameters
    std::string value;
};

/// One `{{...}}` instance. `span_begin`/`span_end` are byte offsets into
/// the parsed string; the substring starts with `{{`, ends with `}}` and
/// has balanced `{{`/`}}` nesting. Named parameter keys and values are
/// trimmed; positional values are kept verbatim.
struct TemplateInstance {
    std::string name;  // trimmed, original case
    std::vector<TemplateParam> params;
    std::size_t span_begin = 0;
    std::size_t span_end = 0;

    /// Last value for a named parameter, or nullopt.
    std::optional<std::string_view> param(std::string_view key) const;
};

/// One resolved `cite journal` occurrence.
struct CitationInstance {
    std::string article_title;
    std::string raw_journal;  // cleaned `journal` field value; may be empty
    std::string dedup_key;    // "ref:<name>" or "anon:<n>"
};

struct WikitextDiagnostics {
    std::uint64_t unbalanced_openers = 0;
    std::uint64_t unterminated_refs = 0;
    std::uint64_t skipped_non_article_pages = 0;
    std::uint64_t skipped_untitled_pages = 0;

    WikitextDiagnostics& operator+=(const WikitextDiagnostics& o) {
        unbalanced_openers += o.unbalanced_openers;
        unterminated_refs += o.unterminated_refs;
        skipped_non_article_pages += o.skipped_non_article_pages;
        skipped_untitled_pages += o.skipped_untitled_pages;
        return *this;
    }
};

/// Parses every template instance, nested ones included (a nested template
/// is returned on its own and appears verbatim inside its parent's
/// parameter value). Pipes inside `[[...]]` links or nested templates do
/// not split parameters. Total: unbalanced `{{` openers are skipped and
/// counted. Results are ordered by span_begin.
std::vector<TemplateInstance> parse_templates(std::string_view wikitext,
                                              WikitextDiagnostics* diag = nullptr);

/// Selects `cite journal` templates (name compared case-insensitively
/// after whitespace normalization) from a namespace-0 page. Templates
/// inside `<ref name="X">...</ref>` share the dedup key X and are emitted
/// at most once per key; self-closing `<ref name="X"/>` contributes
/// nothing; everything else gets a unique key. HTML comments are removed
/// before parsing.
std::vector<CitationInstance> extract_citations(const WikiPage& page,
                                                WikitextDiagnostics* diag = nullptr);

/// Cleans a template field value: trims, rewrites `[[target|label]]` to
/// label and `[[target]]` to target, drops ''/''' markup, collapses
/// whitespace runs and strips one trailing period.
std::string clean_field_value(std::string_view value);

/// Removes `<!-- ... -->` comments (an unterminated comment runs to the
/// end of the text).
std::string strip_html_comments(std::string_view wikitext);

}  // namespace wikicite
