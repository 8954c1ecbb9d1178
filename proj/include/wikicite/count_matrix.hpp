#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wikicite/journal_lexicon.hpp"
#include "wikicite/wikitext.hpp"

namespace wikicite {

struct Triplet {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    std::uint32_t count = 0;
};

struct MatrixStats {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::size_t nnz = 0;
    std::uint64_t total_count = 0;
    double density = 0.0;  // nnz / (n_rows * n_cols); 0 for an empty shape
};

/// Article-by-journal citation counts, stored sparsely. Stored counts are
/// >= 1; labels are unique within their axis. Immutable once built.
class SparseCountMatrix {
public:
    SparseCountMatrix() = default;
    SparseCountMatrix(std::vector<std::string> row_labels,
                      std::vector<std::string> col_labels,
                      std::vector<Triplet> triplets);

    std::size_t n_rows() const noexcept { return row_labels_.size(); }
    std::size_t n_cols() const noexcept { return col_labels_.size(); }
    std::size_t nnz() const noexcept { return triplets_.size(); }
    std::uint64_t total_count() const noexcept { return total_count_; }

    const std::vector<std::string>& row_labels() const noexcept { return row_labels_; }
    const std::vector<std::string>& col_labels() const noexcept { return col_labels_; }

    /// Triplets sorted by (row, col); CSR row offsets alongside.
    std::span<const Triplet> triplets() const noexcept { return triplets_; }
    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }

    /// Stored count at (row, col), 0 if absent.
    std::uint32_t at(std::size_t row, std::size_t col) const;

    MatrixStats stats() const;

    /// Column sums sorted by count descending, ties by ascending name;
    /// at most n entries.
    std::vector<std::pair<std::string, std::uint64_t>> top_cited(std::size_t n) const;

    /// Copy without the named columns (exact label match) and without
    /// rows left empty by the removal. Unknown names are collected into
    /// `missing` when given.
    SparseCountMatrix exclude(const std::vector<std::string>& names,
                              std::vector<std::string>* missing = nullptr) const;

    /// Writes matrix.txt ("nrows ncols nnz" header, then sorted
    /// "row col count" lines) plus articles.txt / journals.txt label
    /// sidecars, one label per line, UTF-8.
    void save(const std::filesystem::path& dir) const;
    static SparseCountMatrix load(const std::filesystem::path& dir);

private:
    std::vector<std::string> row_labels_;
    std::vector<std::string> col_labels_;
    std::vector<Triplet> triplets_;     // sorted by (row, col)
    std::vector<std::size_t> row_ptr_;  // size n_rows + 1
    std::uint64_t total_count_ = 0;
};

/// Accumulates citations into a count matrix. Row indices follow first
/// appearance of the article, column indices first appearance of the
/// normalized journal name. Citations whose cleaned journal is empty are
/// dropped and counted.
class CountMatrixBuilder {
public:
    explicit CountMatrixBuilder(const JournalLexicon& lexicon) : lexicon_(&lexicon) {}

    void add(const CitationInstance& citation);
    void add(std::string_view article_title, std::string_view raw_journal);

    std::uint64_t dropped_empty_journal() const noexcept { return dropped_; }

    SparseCountMatrix build() &&;

private:
    const JournalLexicon* lexicon_;
    std::vector<std::string> row_labels_, col_labels_;
    std::unordered_map<std::string, std::uint32_t> row_index_, col_index_;
    std::unordered_map<std::uint64_t, std::uint32_t> counts_;
    std::uint64_t dropped_ = 0;
};

template <typename Range>
SparseCountMatrix build_matrix(const Range& citations, const JournalLexicon& lexicon,
                               std::uint64_t* dropped_empty_journal = nullptr) {
    CountMatrixBuilder builder(lexicon);
    for (const auto& c : citations) builder.add(c);
    if (dropped_empty_journal) *dropped_empty_journal = builder.dropped_empty_journal();
    return std::move(builder).build();
}

MatrixStats matrix_stats(const SparseCountMatrix& m);

std::vector<std::pair<std::string, std::uint64_t>> top_cited_journals(
    const SparseCountMatrix& m, std::size_t n);

SparseCountMatrix exclude_journals(const SparseCountMatrix& m,
                                   const std::vector<std::string>& names,
                                   std::vector<std::string>* missing = nullptr);

}  // namespace wikicite
