#include "wikicite/journal_lexicon.hpp"

#include <expat.h>

#include <fstream>

#include "wikicite/errors.hpp"
#include "wikicite/text_util.hpp"

namespace wikicite {

namespace {

struct LexiconParseState {
    std::vector<LexiconEntry> entries;
    int depth = 0;
    int capture = 0;  // 0 none, 1 canonical, 2 variant
    std::string buf;
    bool in_journal = false;

    static void XMLCALL on_start(void* ud, const XML_Char* name, const XML_Char**) {
        auto* self = static_cast<LexiconParseState*>(ud);
        self->depth++;
        std::string_view el(name);
        if (self->depth == 2 && el == "journal") {
            self->in_journal = true;
            self->entries.emplace_back();
        } else if (self->in_journal && self->depth == 3) {
            if (el == "canonical") self->capture = 1;
            else if (el == "variant") self->capture = 2;
            self->buf.clear();
        }
    }

    static void XMLCALL on_end(void* ud, const XML_Char* name) {
        auto* self = static_cast<LexiconParseState*>(ud);
        std::string_view el(name);
        if (self->in_journal && self->depth == 3 && self->capture != 0) {
            std::string value = collapse_whitespace(self->buf);
            if (self->capture == 1) self->entries.back().canonical = std::move(value);
            else self->entries.back().variants.push_back(std::move(value));
        } else if (self->depth == 2 && el == "journal") {
            self->in_journal = false;
        }
        self->capture = 0;
        self->depth--;
    }

    static void XMLCALL on_chars(void* ud, const XML_Char* s, int len) {
        auto* self = static_cast<LexiconParseState*>(ud);
        if (self->capture != 0) self->buf.append(s, static_cast<std::size_t>(len));
    }
};

}  // namespace

JournalLexicon JournalLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(path.string());

    LexiconParseState state;
    XML_Parser parser = XML_ParserCreate("UTF-8");
    if (!parser) throw Error("could not allocate XML parser");
    XML_SetUserData(parser, &state);
    XML_SetElementHandler(parser, &LexiconParseState::on_start, &LexiconParseState::on_end);
    XML_SetCharacterDataHandler(parser, &LexiconParseState::on_chars);

    char buf[1 << 14];
    bool done = false;
    while (!done) {
        in.read(buf, sizeof(buf));
        std::streamsize got = in.gcount();
        done = in.eof();
        if (XML_Parse(parser, buf, static_cast<int>(got), done ? 1 : 0) == XML_STATUS_ERROR) {
            long long offset = static_cast<long long>(XML_GetCurrentByteIndex(parser));
            std::string what = "lexicon XML error: ";
            what += XML_ErrorString(XML_GetErrorCode(parser));
            what += " at byte " + std::to_string(offset);
            XML_ParserFree(parser);
            throw XmlError(what, offset);
        }
    }
    XML_ParserFree(parser);

    // entries without a canonical name (stray <journal/> blocks) are dropped
    std::vector<LexiconEntry> entries;
    entries.reserve(state.entries.size());
    for (LexiconEntry& e : state.entries)
        if (!e.canonical.empty()) entries.push_back(std::move(e));
    return from_entries(std::move(entries));
}

JournalLexicon JournalLexicon::from_entries(std::vector<LexiconEntry> entries) {
    JournalLexicon lex;
    lex.entries_ = std::move(entries);
    lex.index_entries();
    return lex;
}

void JournalLexicon::index_entries() {
    lookup_.clear();
    auto add = [this](const std::string& name, const std::string& canonical) {
        std::string key = journal_match_key(name);
        if (key.empty()) return;
        auto [it, inserted] = lookup_.emplace(key, canonical);
        if (!inserted && it->second != canonical)
            throw CollisionError("lexicon key '" + key + "' maps to both '" + it->second +
                                 "' and '" + canonical + "'");
    };
    for (const LexiconEntry& e : entries_) {
        add(e.canonical, e.canonical);
        for (const std::string& v : e.variants) add(v, e.canonical);
    }
}

NormalizedJournal JournalLexicon::normalize(std::string_view raw) const {
    std::string cleaned = clean_journal_name(raw);
    auto it = lookup_.find(journal_match_key(cleaned));
    if (it != lookup_.end()) return NormalizedJournal{it->second, true};
    return NormalizedJournal{std::move(cleaned), false};
}

JournalLexicon load_lexicon(const std::filesystem::path& path) {
    return JournalLexicon::load(path);
}

NormalizedJournal normalize_journal(std::string_view raw, const JournalLexicon& lexicon) {
    return lexicon.normalize(raw);
}

}  // namespace wikicite
