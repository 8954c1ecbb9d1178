#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace wikicite {

/// One page pulled out of a MediaWiki XML export.
struct WikiPage {
    std::string title;     // trimmed; non-empty
    int ns = 0;            // 0 = article
    std::string wikitext;  // text of the last revision in the dump
};

enum class Compression { None, Bzip2, Auto };

struct DumpDiagnostics {
    std::uint64_t invalid_utf8_replacements = 0;
    std::uint64_t pages_empty_title = 0;
};

/// Streaming reader over a MediaWiki export. Holds at most one XML chunk
/// plus the page currently being assembled, so memory stays bounded by
/// the largest single page regardless of dump size.
///
/// Single consumer; not copyable. Independent streams over distinct files
/// may run concurrently.
class PageStream {
public:
    PageStream(const std::filesystem::path& path, Compression compression);
    ~PageStream();
    PageStream(PageStream&&) noexcept;
    PageStream& operator=(PageStream&&) noexcept;
    PageStream(const PageStream&) = delete;
    PageStream& operator=(const PageStream&) = delete;

    /// Next page in dump order, or nullopt at end of stream (idempotent).
    std::optional<WikiPage> next();

    const DumpDiagnostics& diagnostics() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

PageStream open_dump_stream(const std::filesystem::path& path,
                            Compression compression = Compression::Auto);

}  // namespace wikicite
