#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wikicite/count_matrix.hpp"
#include "wikicite/nmf.hpp"

namespace wikicite {

struct DumpSummary {
    std::string dump_id;
    std::uint64_t total_citations = 0;
    std::uint64_t n_articles = 0;
    std::uint64_t n_journal_columns = 0;
};

DumpSummary summarize_dump(const SparseCountMatrix& m, std::string dump_id);

/// Single-file HTML overview: dump summary table, top-cited journals
/// table (count, journal name) and one table per cluster for every model
/// listing the top hub articles and authoritative journals. Sections with
/// no data render a placeholder. All data strings are escaped; output is
/// deterministic.
///
/// `matrix` may be null when only models are reported. Models share one
/// label set (the matrix they were fitted on).
std::string render_html_report(const std::vector<NmfModel>& models,
                               const std::vector<std::string>& model_row_labels,
                               const std::vector<std::string>& model_col_labels,
                               const SparseCountMatrix* matrix,
                               const std::vector<DumpSummary>& summaries,
                               std::size_t top_n);

/// Header plus one row per summary, RFC-4180 quoting.
std::string write_growth_csv(const std::vector<DumpSummary>& summaries);

}  // namespace wikicite
