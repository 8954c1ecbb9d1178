#include "wikicite/dump_reader.hpp"

#include <expat.h>

#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filtering_stream.hpp>
#include <charconv>
#include <deque>
#include <fstream>
#include <vector>

#include "wikicite/errors.hpp"
#include "wikicite/text_util.hpp"

namespace io = boost::iostreams;

namespace wikicite {

namespace {

bool looks_bzip2(std::istream& in) {
    char magic[3] = {0, 0, 0};
    in.read(magic, 3);
    bool bz = in.gcount() == 3 && magic[0] == 'B' && magic[1] == 'Z' && magic[2] == 'h';
    in.clear();
    in.seekg(0);
    return bz;
}

}  // namespace

struct PageStream::Impl {
    std::ifstream file;
    io::filtering_istream in;  // decompression chain (or plain passthrough)
    XML_Parser parser = nullptr;
    Utf8Sanitizer sanitizer;
    DumpDiagnostics diag;

    std::deque<WikiPage> ready;
    bool exhausted = false;
    long long bytes_fed = 0;  // sanitized bytes handed to expat

    // element state
    int depth = 0;
    bool in_page = false;
    int capture = 0;  // 0 none, 1 title, 2 ns, 3 text
    std::string cur_title, cur_ns, cur_text, page_text;
    bool revision_seen = false;

    explicit Impl(const std::filesystem::path& path, Compression compression) {
        std::error_code ec;
        if (!std::filesystem::exists(path, ec) || ec)
            throw FileNotFoundError(path.string());
        file.open(path, std::ios::binary);
        if (!file) throw FileNotFoundError(path.string());

        bool bz = false;
        switch (compression) {
            case Compression::None: break;
            case Compression::Bzip2: bz = true; break;
            case Compression::Auto: bz = looks_bzip2(file); break;
        }
        if (bz) in.push(io::bzip2_decompressor());
        in.push(file);
        in.exceptions(std::ios::badbit);

        parser = XML_ParserCreate("UTF-8");
        if (!parser) throw Error("could not allocate XML parser");
        XML_SetUserData(parser, this);
        XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
        XML_SetCharacterDataHandler(parser, &Impl::on_chars);
    }

    ~Impl() {
        if (parser) XML_ParserFree(parser);
    }

    static void XMLCALL on_start(void* ud, const XML_Char* name, const XML_Char**) {
        auto* self = static_cast<Impl*>(ud);
        self->depth++;
        std::string_view el(name);
        if (self->depth == 2 && el == "page") {
            self->in_page = true;
            self->cur_title.clear();
            self->cur_ns.clear();
            self->page_text.clear();
            self->revision_seen = false;
        } else if (self->in_page) {
            if (self->depth == 3 && el == "title") self->capture = 1;
            else if (self->depth == 3 && el == "ns") self->capture = 2;
            else if (self->depth == 3 && el == "revision") self->cur_text.clear();
            else if (self->depth == 4 && el == "text") self->capture = 3;
        }
    }

    static void XMLCALL on_end(void* ud, const XML_Char* name) {
        auto* self = static_cast<Impl*>(ud);
        std::string_view el(name);
        if (self->in_page) {
            if (self->depth == 3 && el == "revision") {
                // last revision in the page wins
                self->page_text = std::move(self->cur_text);
                self->cur_text.clear();
                self->revision_seen = true;
            } else if (self->depth == 2 && el == "page") {
                self->finish_page();
                self->in_page = false;
            }
        }
        self->capture = 0;
        self->depth--;
    }

    static void XMLCALL on_chars(void* ud, const XML_Char* s, int len) {
        auto* self = static_cast<Impl*>(ud);
        if (!self->in_page || self->capture == 0) return;
        std::string_view chunk(s, static_cast<std::size_t>(len));
        switch (self->capture) {
            case 1: self->cur_title += chunk; break;
            case 2: self->cur_ns += chunk; break;
            case 3: self->cur_text += chunk; break;
        }
    }

    void finish_page() {
        WikiPage page;
        page.title = std::string(trim(cur_title));
        if (page.title.empty()) {
            diag.pages_empty_title++;
            return;
        }
        std::string_view ns = trim(cur_ns);
        page.ns = 0;  // exports older than schema 0.4 carry no <ns>
        if (!ns.empty()) {
            int value = 0;
            auto [p, ec] = std::from_chars(ns.data(), ns.data() + ns.size(), value);
            if (ec == std::errc() && p == ns.data() + ns.size()) page.ns = value;
        }
        page.wikitext = std::move(page_text);
        page_text.clear();
        ready.push_back(std::move(page));
    }

    void pump() {
        char raw[1 << 16];
        std::string clean;
        std::streamsize got = 0;
        try {
            in.read(raw, sizeof(raw));
            got = in.gcount();
        } catch (const io::bzip2_error& e) {
            throw DecompressionError(
                "bzip2 decompression failed (" + std::string(e.what()) + ") after " +
                    std::to_string(bytes_fed) + " decompressed bytes",
                bytes_fed);
        } catch (const std::ios_base::failure&) {
            throw DecompressionError("read failed after " + std::to_string(bytes_fed) +
                                         " decompressed bytes",
                                     bytes_fed);
        }
        bool eof = in.eof();
        clean.reserve(static_cast<std::size_t>(got));
        sanitizer.feed(std::string_view(raw, static_cast<std::size_t>(got)), clean);
        if (eof) sanitizer.finish(clean);
        diag.invalid_utf8_replacements = sanitizer.replacements();

        if (XML_Parse(parser, clean.data(), static_cast<int>(clean.size()), eof ? 1 : 0) ==
            XML_STATUS_ERROR) {
            long long offset = static_cast<long long>(XML_GetCurrentByteIndex(parser));
            std::string what = "XML error: ";
            what += XML_ErrorString(XML_GetErrorCode(parser));
            what += " at byte " + std::to_string(offset);
            if (in_page && !trim(cur_title).empty())
                what += " (in page '" + std::string(trim(cur_title)) + "')";
            throw XmlError(what, offset);
        }
        bytes_fed += static_cast<long long>(clean.size());
        if (eof) exhausted = true;
    }

    std::optional<WikiPage> next() {
        while (ready.empty() && !exhausted) pump();
        if (ready.empty()) return std::nullopt;
        WikiPage page = std::move(ready.front());
        ready.pop_front();
        return page;
    }
};

PageStream::PageStream(const std::filesystem::path& path, Compression compression)
    : impl_(std::make_unique<Impl>(path, compression)) {}
PageStream::~PageStream() = default;
PageStream::PageStream(PageStream&&) noexcept = default;
PageStream& PageStream::operator=(PageStream&&) noexcept = default;

std::optional<WikiPage> PageStream::next() { return impl_->next(); }

const DumpDiagnostics& PageStream::diagnostics() const { return impl_->diag; }

PageStream open_dump_stream(const std::filesystem::path& path, Compression compression) {
    return PageStream(path, compression);
}

}  // namespace wikicite
