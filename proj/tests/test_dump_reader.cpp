#include <doctest.h>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "wikicite/dump_reader.hpp"
#include "wikicite/errors.hpp"
#include "test_support.hpp"

using namespace wikicite;
using testsupport::TempDir;

namespace {

const std::filesystem::path kFixtures = WIKICITE_FIXTURE_DIR;

std::vector<WikiPage> drain(PageStream& stream) {
    std::vector<WikiPage> pages;
    while (auto page = stream.next()) pages.push_back(std::move(*page));
    return pages;
}

// Peak resident set in kB, from the kernel's per-process accounting.
long vm_hwm_kb() {
    std::ifstream in("/proc/self/status");
    std::string key;
    long value = 0;
    while (in >> key) {
        if (key == "VmHWM:") {
            in >> value;
            return value;
        }
        in.ignore(1 << 20, '\n');
    }
    return 0;
}

}  // namespace

TEST_CASE("two page fixture streams both pages in document order") {
    PageStream stream = open_dump_stream(kFixtures / "two_pages.xml", Compression::None);
    std::vector<WikiPage> pages = drain(stream);
    REQUIRE(pages.size() == 2);
    CHECK(pages[0].title == "Alpha");
    CHECK(pages[1].title == "Beta");
}

TEST_CASE("only the last revision of a page is kept") {
    PageStream stream = open_dump_stream(kFixtures / "two_pages.xml");
    std::vector<WikiPage> pages = drain(stream);
    REQUIRE(pages.size() == 2);
    CHECK(pages[0].wikitext.find("first letter") != std::string::npos);
    CHECK(pages[0].wikitext.find("Old draft") == std::string::npos);
}

TEST_CASE("missing ns defaults to article namespace, missing text to empty") {
    PageStream stream = open_dump_stream(kFixtures / "two_pages.xml");
    std::vector<WikiPage> pages = drain(stream);
    REQUIRE(pages.size() == 2);
    CHECK(pages[0].ns == 0);
    CHECK(pages[1].ns == 0);
    CHECK(pages[1].wikitext.empty());
}

TEST_CASE("exhausted stream keeps returning end-of-stream") {
    PageStream stream = open_dump_stream(kFixtures / "two_pages.xml");
    drain(stream);
    CHECK_FALSE(stream.next().has_value());
    CHECK_FALSE(stream.next().has_value());
}

TEST_CASE("bzip2 and plain streams yield identical pages") {
    auto read_all = [](const std::filesystem::path& p, Compression c) {
        PageStream stream = open_dump_stream(p, c);
        std::vector<std::pair<std::string, std::string>> out;
        while (auto page = stream.next()) out.emplace_back(page->title, page->wikitext);
        return out;
    };
    auto plain = read_all(kFixtures / "two_pages.xml", Compression::Auto);
    auto compressed = read_all(kFixtures / "two_pages.xml.bz2", Compression::Auto);
    auto explicit_bz2 = read_all(kFixtures / "two_pages.xml.bz2", Compression::Bzip2);
    CHECK(plain == compressed);
    CHECK(plain == explicit_bz2);

    auto big_plain = read_all(kFixtures / "fixture_dump.xml", Compression::Auto);
    auto big_bz2 = read_all(kFixtures / "fixture_dump.xml.bz2", Compression::Auto);
    CHECK(big_plain.size() == 6);
    CHECK(big_plain == big_bz2);
}

TEST_CASE("empty document yields zero pages without error") {
    TempDir tmp("empty_dump");
    testsupport::write_file(tmp / "empty.xml", "<mediawiki></mediawiki>");
    PageStream stream = open_dump_stream(tmp / "empty.xml");
    CHECK_FALSE(stream.next().has_value());
}

TEST_CASE("missing file raises FileNotFoundError") {
    CHECK_THROWS_AS(open_dump_stream("/nonexistent/dump.xml"), FileNotFoundError);
}

TEST_CASE("truncated bzip2 input raises DecompressionError with an offset") {
    std::string whole = testsupport::read_file(kFixtures / "fixture_dump.xml.bz2");
    TempDir tmp("trunc_bz2");
    testsupport::write_file(tmp / "trunc.bz2", whole.substr(0, whole.size() / 2));
    PageStream stream = open_dump_stream(tmp / "trunc.bz2");
    try {
        drain(stream);
        FAIL("expected DecompressionError");
    } catch (const DecompressionError& e) {
        CHECK(e.byte_offset() >= 0);
    }
}

TEST_CASE("garbage input raises DecompressionError when bzip2 is forced") {
    TempDir tmp("not_bz2");
    testsupport::write_file(tmp / "noise.bin", "this is not compressed data at all");
    PageStream stream = open_dump_stream(tmp / "noise.bin", Compression::Bzip2);
    CHECK_THROWS_AS(drain(stream), DecompressionError);
}

TEST_CASE("malformed xml raises XmlError with byte offset and page title") {
    TempDir tmp("bad_xml");
    testsupport::write_file(tmp / "bad.xml",
                            "<mediawiki><page><title>Broken page</title><ns>0</ns>"
                            "<revision><text>&undefined;</text></revision></page></mediawiki>");
    PageStream stream = open_dump_stream(tmp / "bad.xml");
    try {
        drain(stream);
        FAIL("expected XmlError");
    } catch (const XmlError& e) {
        CHECK(e.byte_offset() >= 0);
        CHECK(std::string(e.what()).find("Broken page") != std::string::npos);
    }
}

TEST_CASE("unterminated document raises XmlError") {
    TempDir tmp("eof_xml");
    testsupport::write_file(tmp / "cut.xml",
                            "<mediawiki><page><title>T</title><ns>0</ns><revision>"
                            "<text>body</text></revision></page>");
    PageStream stream = open_dump_stream(tmp / "cut.xml");
    CHECK_THROWS_AS(drain(stream), XmlError);
}

TEST_CASE("invalid utf-8 bytes become replacement characters and are tallied") {
    TempDir tmp("bad_utf8");
    std::string doc =
        "<mediawiki><page><title>Enc</title><ns>0</ns><revision>"
        "<text>good \xFF\xFE bad</text></revision></page></mediawiki>";
    testsupport::write_file(tmp / "enc.xml", doc);
    PageStream stream = open_dump_stream(tmp / "enc.xml");
    std::vector<WikiPage> pages = drain(stream);
    REQUIRE(pages.size() == 1);
    CHECK(pages[0].wikitext == "good \xEF\xBF\xBD\xEF\xBF\xBD bad");
    CHECK(stream.diagnostics().invalid_utf8_replacements == 2);
}

TEST_CASE("pages with whitespace-only titles are dropped and counted") {
    TempDir tmp("untitled");
    testsupport::write_file(tmp / "untitled.xml",
                            "<mediawiki>"
                            "<page><title>  </title><ns>0</ns><revision><text>x</text>"
                            "</revision></page>"
                            "<page><title>Kept</title><ns>0</ns><revision><text>y</text>"
                            "</revision></page>"
                            "</mediawiki>");
    PageStream stream = open_dump_stream(tmp / "untitled.xml");
    std::vector<WikiPage> pages = drain(stream);
    REQUIRE(pages.size() == 1);
    CHECK(pages[0].title == "Kept");
    CHECK(stream.diagnostics().pages_empty_title == 1);
}

TEST_CASE("memory stays bounded while streaming a 50x larger dump") {
    // Repeat the fixture's <page> block N times inside one document,
    // writing chunks straight to disk so the test itself never holds the
    // large input in memory.
    std::string doc = testsupport::read_file(kFixtures / "fixture_dump.xml");
    std::size_t first = doc.find("<page>");
    std::size_t last = doc.rfind("</page>") + 7;
    REQUIRE(first != std::string::npos);
    std::string head = doc.substr(0, first);
    std::string pages = doc.substr(first, last - first);
    std::string tail = doc.substr(last);
    doc.clear();
    doc.shrink_to_fit();

    TempDir tmp("mem");
    auto write_repeated = [&](const std::filesystem::path& p, int n) {
        std::ofstream out(p, std::ios::binary);
        out << head;
        for (int i = 0; i < n; i++) out << pages;
        out << tail;
    };
    write_repeated(tmp / "n1.xml", 1);
    write_repeated(tmp / "n50.xml", 50);

    auto stream_all = [](const std::filesystem::path& p) {
        PageStream stream = open_dump_stream(p);
        std::size_t count = 0;
        while (auto page = stream.next()) count++;
        return count;
    };

    CHECK(stream_all(tmp / "n1.xml") == 6);
    long before = vm_hwm_kb();
    CHECK(stream_all(tmp / "n50.xml") == 300);
    long grown_kb = vm_hwm_kb() - before;
    // n50.xml is ~5 MB; a reader that buffered the document would push the
    // peak up by at least that much.
    CHECK(grown_kb < 4096);
}
