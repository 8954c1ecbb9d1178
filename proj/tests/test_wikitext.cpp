#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "wikicite/wikitext.hpp"

using namespace wikicite;

namespace {

WikiPage article(std::string text, std::string title = "Test page") {
    return WikiPage{std::move(title), 0, std::move(text)};
}

// Span check kept independent of the parser: scan the claimed substring
// with its own two-character tokenizer and verify `{{ ... }}` balance.
bool span_is_sound(std::string_view wikitext, const TemplateInstance& t) {
    if (t.span_end <= t.span_begin || t.span_end > wikitext.size()) return false;
    std::string_view s = wikitext.substr(t.span_begin, t.span_end - t.span_begin);
    if (s.size() < 4 || s.substr(0, 2) != "{{" || s.substr(s.size() - 2) != "}}")
        return false;
    long depth = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s.compare(i, 2, "{{") == 0) {
            depth++;
            i += 2;
        } else if (s.compare(i, 2, "}}") == 0) {
            depth--;
            if (depth == 0 && i + 2 != s.size()) return false;  // closed early
            if (depth < 0) return false;
            i += 2;
        } else {
            i++;
        }
    }
    return depth == 0;
}

std::size_t count_cite_journal(const std::vector<TemplateInstance>& templates) {
    std::size_t n = 0;
    for (const auto& t : templates) {
        std::string folded;
        for (char c : t.name) folded += (c >= 'A' && c <= 'Z') ? char(c + 32) : c;
        if (folded == "cite journal") n++;
    }
    return n;
}

}  // namespace

TEST_CASE("single template with named parameters") {
    auto templates = parse_templates("{{cite journal | journal = Nature | year=2005}}");
    REQUIRE(templates.size() == 1);
    const TemplateInstance& t = templates[0];
    CHECK(t.name == "cite journal");
    REQUIRE(t.params.size() == 2);
    CHECK(t.params[0].key == "journal");
    CHECK(t.params[0].value == "Nature");
    CHECK(t.params[1].key == "year");
    CHECK(t.params[1].value == "2005");
}

TEST_CASE("pipe inside a wiki link does not split parameters") {
    auto templates = parse_templates("{{cite journal|journal=[[Nature (journal)|Nature]]}}");
    REQUIRE(templates.size() == 1);
    REQUIRE(templates[0].params.size() == 1);
    CHECK(templates[0].params[0].key == "journal");
    CHECK(templates[0].params[0].value == "[[Nature (journal)|Nature]]");
}

TEST_CASE("text without templates parses to an empty list") {
    CHECK(parse_templates("no templates here").empty());
    CHECK(parse_templates("").empty());
    CHECK(parse_templates("[[just|a link]] and }} a stray closer").empty());
}

TEST_CASE("nested templates appear standalone and verbatim in the parent") {
    std::string text = "{{Infobox|source={{cite journal|journal=Gene}}|other=1}}";
    auto templates = parse_templates(text);
    REQUIRE(templates.size() == 2);
    CHECK(templates[0].name == "Infobox");  // ordered by span start
    CHECK(templates[1].name == "cite journal");
    auto source = templates[0].param("source");
    REQUIRE(source.has_value());
    CHECK(*source == "{{cite journal|journal=Gene}}");
    CHECK(span_is_sound(text, templates[0]));
    CHECK(span_is_sound(text, templates[1]));
}

TEST_CASE("positional parameters keep their values verbatim") {
    auto templates = parse_templates("{{t| one |two}}");
    REQUIRE(templates.size() == 1);
    REQUIRE(templates[0].params.size() == 2);
    CHECK_FALSE(templates[0].params[0].key.has_value());
    CHECK(templates[0].params[0].value == " one ");
    CHECK(templates[0].params[1].value == "two");
}

TEST_CASE("only the first equals sign splits a named parameter") {
    auto templates = parse_templates("{{t|eq=a=b|url=http://x/?a=1}}");
    REQUIRE(templates.size() == 1);
    CHECK(templates[0].params[0].key == "eq");
    CHECK(templates[0].params[0].value == "a=b");
    CHECK(templates[0].params[1].key == "url");
    CHECK(templates[0].params[1].value == "http://x/?a=1");
}

TEST_CASE("param() returns the last occurrence of a repeated key") {
    auto templates = parse_templates("{{t|a=1|a=2}}");
    REQUIRE(templates.size() == 1);
    auto v = templates[0].param("a");
    REQUIRE(v.has_value());
    CHECK(*v == "2");
    CHECK_FALSE(templates[0].param("missing").has_value());
}

TEST_CASE("unbalanced openers are skipped and counted") {
    WikitextDiagnostics diag;
    auto templates = parse_templates("text {{never closed", &diag);
    CHECK(templates.empty());
    CHECK(diag.unbalanced_openers == 1);

    WikitextDiagnostics diag2;
    auto mixed = parse_templates("{{outer {{inner}} still open", &diag2);
    REQUIRE(mixed.size() == 1);  // the inner one closed fine
    CHECK(mixed[0].name == "inner");
    CHECK(diag2.unbalanced_openers == 1);
}

TEST_CASE("clean_field_value trims, rewrites links, strips quotes and one period") {
    CHECK(clean_field_value("  The Lancet ") == "The Lancet");
    CHECK(clean_field_value("[[Nature (journal)|Nature]]") == "Nature");
    CHECK(clean_field_value("''Proc R Soc Lond B Biol Sci.''") ==
          "Proc R Soc Lond B Biol Sci");
    CHECK(clean_field_value("[[Plain target]]") == "Plain target");
    CHECK(clean_field_value("'''''both markers'''''") == "both markers");
    CHECK(clean_field_value("it's fine") == "it's fine");  // lone apostrophe survives
    CHECK(clean_field_value("two  spaces\tand\ttabs") == "two spaces and tabs");
    CHECK(clean_field_value("") == "");
}

TEST_CASE("named ref citations collapse onto one dedup key") {
    WikiPage page = article(
        "A<ref name=\"a\">{{cite journal|journal=Cell}}</ref> B, later reused"
        "<ref name=\"a\"/> C");
    auto citations = extract_citations(page);
    REQUIRE(citations.size() == 1);
    CHECK(citations[0].raw_journal == "Cell");
    CHECK(citations[0].dedup_key == "ref:a");
    CHECK(citations[0].article_title == "Test page");
}

TEST_CASE("repeating the same named ref with content still counts once") {
    WikiPage page = article(
        "<ref name=\"x\">{{cite journal|journal=Cell}}</ref> and again "
        "<ref name=\"x\">{{cite journal|journal=Cell}}</ref>");
    auto citations = extract_citations(page);
    CHECK(citations.size() == 1);
}

TEST_CASE("bare duplicate citations stay distinct") {
    WikiPage page =
        article("{{cite journal|journal=Cell}} and {{cite journal|journal=Cell}}");
    auto citations = extract_citations(page);
    REQUIRE(citations.size() == 2);
    CHECK(citations[0].dedup_key == "anon:0");
    CHECK(citations[1].dedup_key == "anon:1");
    CHECK(citations[0].raw_journal == "Cell");
    CHECK(citations[1].raw_journal == "Cell");
}

TEST_CASE("template name matching ignores case and spacing") {
    CHECK(extract_citations(article("{{Cite Journal|journal=Gene}}")).size() == 1);
    CHECK(extract_citations(article("{{ cite  journal |journal=Gene}}")).size() == 1);
    CHECK(extract_citations(article("{{cite web|url=http://x}}")).empty());
    CHECK(extract_citations(article("{{citation|journal=Gene}}")).empty());
}

TEST_CASE("citations without a journal field are emitted with an empty name") {
    auto citations = extract_citations(article("{{cite journal|title=Untitled}}"));
    REQUIRE(citations.size() == 1);
    CHECK(citations[0].raw_journal.empty());
}

TEST_CASE("non-article pages yield nothing and are counted") {
    WikitextDiagnostics diag;
    WikiPage talk{"Talk:Something", 1, "{{cite journal|journal=Cell}}"};
    CHECK(extract_citations(talk, &diag).empty());
    CHECK(diag.skipped_non_article_pages == 1);
}

TEST_CASE("ref name attribute accepts single, double and no quotes") {
    for (std::string open : {"<ref name=\"k\">", "<ref name='k'>", "<ref name=k>"}) {
        WikiPage page = article(open + "{{cite journal|journal=Cell}}</ref>");
        auto citations = extract_citations(page);
        REQUIRE(citations.size() == 1);
        CHECK(citations[0].dedup_key == "ref:k");
    }
}

TEST_CASE("an unterminated ref runs to the end of the page and is counted") {
    WikitextDiagnostics diag;
    WikiPage page = article("<ref name=\"u\">{{cite journal|journal=Cell}} no close tag");
    auto citations = extract_citations(page, &diag);
    REQUIRE(citations.size() == 1);
    CHECK(citations[0].dedup_key == "ref:u");
    CHECK(diag.unterminated_refs == 1);
}

TEST_CASE("citations hidden in html comments are ignored") {
    CHECK(extract_citations(article("<!-- {{cite journal|journal=Hidden}} -->")).empty());
    // unterminated comment swallows the rest of the page
    CHECK(extract_citations(article("<!-- {{cite journal|journal=Hidden}}")).empty());
    CHECK(strip_html_comments("a<!--b-->c") == "ac");
    CHECK(strip_html_comments("a<!--b") == "a");
}

TEST_CASE("nested citation inside another template is found") {
    auto citations = extract_citations(
        article("{{Infobox|source={{cite journal|journal=Genome Research}}}}"));
    REQUIRE(citations.size() == 1);
    CHECK(citations[0].raw_journal == "Genome Research");
}

TEST_CASE("appending self-closing refs never changes the extraction") {
    std::vector<std::string> bodies = {
        "<ref name=\"a\">{{cite journal|journal=Cell}}</ref> text",
        "{{cite journal|journal=Gene}} more",
        "nothing to cite",
    };
    for (const std::string& body : bodies) {
        auto base = extract_citations(article(body));
        std::string extended = body;
        for (int i = 0; i < 4; i++) extended += "<ref name=\"a\"/>";
        auto after = extract_citations(article(extended));
        REQUIRE(base.size() == after.size());
        for (std::size_t i = 0; i < base.size(); i++) {
            CHECK(base[i].raw_journal == after[i].raw_journal);
            CHECK(base[i].dedup_key == after[i].dedup_key);
        }
    }
}

TEST_CASE("citation count never exceeds the template count") {
    std::vector<std::string> bodies = {
        "<ref name=\"a\">{{cite journal|journal=X}}</ref><ref name=\"a\"/>",
        "{{cite journal|journal=X}}{{cite journal|journal=Y}}",
        "{{cite web|u=v}}",
        "<ref name=\"a\">{{cite journal|journal=X}}</ref>"
        "<ref name=\"a\">{{cite journal|journal=Y}}</ref>",
    };
    for (const std::string& body : bodies) {
        auto templates = parse_templates(body);
        auto citations = extract_citations(article(body));
        CHECK(citations.size() <= count_cite_journal(templates));
    }
}

TEST_CASE("parser is total over random byte soup") {
    std::mt19937 gen(20080312);
    std::uniform_int_distribution<int> len(0, 300);
    std::uniform_int_distribution<int> byte(0, 255);
    // bias toward structural characters so brace handling actually runs
    const std::string structural = "{}[]|=<>/\"' refcitejournal";
    std::uniform_int_distribution<int> pick(0, int(structural.size()) - 1);
    std::bernoulli_distribution use_structural(0.6);

    for (int i = 0; i < 1000; i++) {
        std::string text;
        int n = len(gen);
        for (int j = 0; j < n; j++)
            text += use_structural(gen) ? structural[pick(gen)]
                                        : static_cast<char>(byte(gen));
        WikitextDiagnostics diag;
        auto templates = parse_templates(text, &diag);
        for (const auto& t : templates) CHECK(span_is_sound(text, t));
        extract_citations(article(text), &diag);  // must not throw either
    }
}

TEST_CASE("spans are sound on structured generated pages") {
    std::mt19937 gen(42);
    std::uniform_int_distribution<int> part(0, 7);
    for (int page = 0; page < 200; page++) {
        std::string text;
        int parts = 3 + int(gen() % 20);
        for (int i = 0; i < parts; i++) {
            switch (part(gen)) {
                case 0: text += "Plain prose with [[A link|label]] inside. "; break;
                case 1: text += "{{cite journal|journal=J" + std::to_string(gen() % 5) + "}}"; break;
                case 2: text += "<ref name=\"r" + std::to_string(gen() % 3) + "\">"; break;
                case 3: text += "</ref>"; break;
                case 4: text += "{{outer|p={{inner|q=1}}}}"; break;
                case 5: text += "{{ dangling "; break;
                case 6: text += "}} "; break;
                default: text += "<!-- hidden {{x}} -->"; break;
            }
        }
        auto templates = parse_templates(text);
        for (const auto& t : templates) CHECK(span_is_sound(text, t));
    }
}
