#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "wikicite/dump_reader.hpp"
#include "wikicite/wikitext.hpp"

namespace wikicite {

struct PipelineConfig {
    std::filesystem::path dump_path;
    std::filesystem::path lexicon_path;
    std::filesystem::path output_dir;
    std::string dump_id;  // defaults to the dump filename stem
    Compression compression = Compression::Auto;
    std::vector<std::string> exclude_journals;
    int k_min = 1;
    int k_max = 20;
    long iterations = 50000;
    std::uint64_t seed = 0;
    double min_overlap = 0.1;
    int labels_per_node = 1;
    std::size_t top_n = 12;
    int jobs = 1;

    /// Throws UsageError when invariants are violated
    /// (1 <= k_min <= k_max, iterations >= 1, min_overlap in [0,1], ...).
    void validate() const;
};

struct ExtractStats {
    std::uint64_t pages_seen = 0;
    std::uint64_t citations_emitted = 0;
    DumpDiagnostics dump;
    WikitextDiagnostics wikitext;
};

/// Streams a dump into one JSON object per citation
/// ({"article", "journal_raw", "dedup_key"}).
ExtractStats extract_to_jsonl(const std::filesystem::path& dump_path,
                              const std::filesystem::path& out_path,
                              Compression compression = Compression::Auto);

/// Reads citations back from the JSON-lines file written by
/// extract_to_jsonl.
std::vector<CitationInstance> read_citations_jsonl(const std::filesystem::path& path);

/// Runs extract -> matrix -> exclude -> nmf sweep -> bush -> report,
/// writing citations.jsonl, matrix/, matrix_nmf/ (when exclusions apply),
/// models/, bush.svg, report.html and growth.csv under output_dir plus a
/// run.json with the resolved config and per-stage wall time. Stages are
/// skipped when their outputs exist and the content hash of their inputs
/// is unchanged. Nothing is written outside output_dir.
void run_pipeline(const PipelineConfig& config, std::ostream& log);

}  // namespace wikicite
