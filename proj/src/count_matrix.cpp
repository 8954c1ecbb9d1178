#include "wikicite/count_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_set>

#include "wikicite/errors.hpp"
#include "wikicite/text_util.hpp"

namespace wikicite {

namespace {

void check_unique(const std::vector<std::string>& labels, const char* axis) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(labels.size());
    for (const std::string& l : labels)
        if (!seen.insert(l).second)
            throw DataError(std::string("duplicate ") + axis + " label '" + l + "'");
}

std::ifstream open_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FileNotFoundError(p.string());
    return in;
}

void write_labels(const std::filesystem::path& p, const std::vector<std::string>& labels) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    for (const std::string& l : labels) out << l << '\n';
    if (!out) throw DataError("write failed: " + p.string());
}

std::vector<std::string> read_labels(const std::filesystem::path& p) {
    std::ifstream in = open_text(p);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        labels.push_back(line);
    }
    return labels;
}

}  // namespace

SparseCountMatrix::SparseCountMatrix(std::vector<std::string> row_labels,
                                     std::vector<std::string> col_labels,
                                     std::vector<Triplet> triplets)
    : row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      triplets_(std::move(triplets)) {
    check_unique(row_labels_, "row");
    check_unique(col_labels_, "column");
    std::sort(triplets_.begin(), triplets_.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    const std::size_t rows = row_labels_.size();
    row_ptr_.assign(rows + 1, 0);
    std::uint32_t prev_row = 0, prev_col = 0;
    bool first = true;
    for (const Triplet& t : triplets_) {
        if (t.row >= rows || t.col >= col_labels_.size())
            throw IndexOutOfRangeError("matrix entry (" + std::to_string(t.row) + ", " +
                                       std::to_string(t.col) + ") outside shape");
        if (t.count == 0) throw DataError("matrix entry with zero count");
        if (!first && t.row == prev_row && t.col == prev_col)
            throw DataError("duplicate matrix entry (" + std::to_string(t.row) + ", " +
                            std::to_string(t.col) + ")");
        prev_row = t.row;
        prev_col = t.col;
        first = false;
        row_ptr_[t.row + 1]++;
        total_count_ += t.count;
    }
    for (std::size_t r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

std::uint32_t SparseCountMatrix::at(std::size_t row, std::size_t col) const {
    if (row >= n_rows() || col >= n_cols())
        throw IndexOutOfRangeError("at(" + std::to_string(row) + ", " + std::to_string(col) +
                                   ") outside shape");
    auto begin = triplets_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    auto end = triplets_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    auto it = std::lower_bound(begin, end, col, [](const Triplet& t, std::size_t c) {
        return t.col < c;
    });
    return it != end && it->col == col ? it->count : 0;
}

MatrixStats SparseCountMatrix::stats() const {
    MatrixStats s;
    s.n_rows = n_rows();
    s.n_cols = n_cols();
    s.nnz = nnz();
    s.total_count = total_count_;
    s.density = s.n_rows == 0 || s.n_cols == 0
                    ? 0.0
                    : static_cast<double>(s.nnz) /
                          (static_cast<double>(s.n_rows) * static_cast<double>(s.n_cols));
    return s;
}

std::vector<std::pair<std::string, std::uint64_t>> SparseCountMatrix::top_cited(
    std::size_t n) const {
    std::vector<std::uint64_t> sums(n_cols(), 0);
    for (const Triplet& t : triplets_) sums[t.col] += t.count;
    std::vector<std::pair<std::string, std::uint64_t>> ranked;
    ranked.reserve(n_cols());
    for (std::size_t c = 0; c < n_cols(); ++c) ranked.emplace_back(col_labels_[c], sums[c]);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > n) ranked.resize(n);
    return ranked;
}

SparseCountMatrix SparseCountMatrix::exclude(const std::vector<std::string>& names,
                                             std::vector<std::string>* missing) const {
    std::unordered_set<std::string_view> drop;
    for (const std::string& name : names) {
        bool known = std::find(col_labels_.begin(), col_labels_.end(), name) !=
                     col_labels_.end();
        if (known) drop.insert(name);
        else if (missing) missing->push_back(name);
    }

    constexpr std::uint32_t kGone = 0xffffffffu;
    std::vector<std::uint32_t> col_map(n_cols(), kGone);
    std::vector<std::string> cols;
    for (std::size_t c = 0; c < n_cols(); ++c) {
        if (drop.count(col_labels_[c])) continue;
        col_map[c] = static_cast<std::uint32_t>(cols.size());
        cols.push_back(col_labels_[c]);
    }

    std::vector<bool> row_alive(n_rows(), false);
    for (const Triplet& t : triplets_)
        if (col_map[t.col] != kGone) row_alive[t.row] = true;

    std::vector<std::uint32_t> row_map(n_rows(), kGone);
    std::vector<std::string> rows;
    for (std::size_t r = 0; r < n_rows(); ++r) {
        if (!row_alive[r]) continue;
        row_map[r] = static_cast<std::uint32_t>(rows.size());
        rows.push_back(row_labels_[r]);
    }

    std::vector<Triplet> kept;
    kept.reserve(triplets_.size());
    for (const Triplet& t : triplets_)
        if (col_map[t.col] != kGone)
            kept.push_back(Triplet{row_map[t.row], col_map[t.col], t.count});
    return SparseCountMatrix(std::move(rows), std::move(cols), std::move(kept));
}

void SparseCountMatrix::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "matrix.txt", std::ios::binary);
        if (!out) throw DataError("cannot write " + (dir / "matrix.txt").string());
        out << n_rows() << ' ' << n_cols() << ' ' << nnz() << '\n';
        for (const Triplet& t : triplets_)
            out << t.row << ' ' << t.col << ' ' << t.count << '\n';
        if (!out) throw DataError("write failed: " + (dir / "matrix.txt").string());
    }
    write_labels(dir / "articles.txt", row_labels_);
    write_labels(dir / "journals.txt", col_labels_);
}

SparseCountMatrix SparseCountMatrix::load(const std::filesystem::path& dir) {
    std::ifstream in = open_text(dir / "matrix.txt");
    std::size_t rows = 0, cols = 0, count = 0;
    if (!(in >> rows >> cols >> count))
        throw DataError("malformed matrix header in " + (dir / "matrix.txt").string());
    std::vector<Triplet> triplets;
    triplets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Triplet t;
        if (!(in >> t.row >> t.col >> t.count))
            throw DataError("malformed matrix entry " + std::to_string(i) + " in " +
                            (dir / "matrix.txt").string());
        triplets.push_back(t);
    }
    std::vector<std::string> row_labels = read_labels(dir / "articles.txt");
    std::vector<std::string> col_labels = read_labels(dir / "journals.txt");
    if (row_labels.size() != rows || col_labels.size() != cols)
        throw DataError("label files do not match matrix shape in " + dir.string());
    return SparseCountMatrix(std::move(row_labels), std::move(col_labels),
                             std::move(triplets));
}

void CountMatrixBuilder::add(const CitationInstance& citation) {
    add(citation.article_title, citation.raw_journal);
}

void CountMatrixBuilder::add(std::string_view article_title, std::string_view raw_journal) {
    NormalizedJournal journal = lexicon_->normalize(raw_journal);
    if (journal.name.empty()) {
        dropped_++;
        return;
    }
    std::string article(article_title);
    auto [rit, rnew] = row_index_.emplace(article, static_cast<std::uint32_t>(row_labels_.size()));
    if (rnew) row_labels_.push_back(std::move(article));
    auto [cit, cnew] =
        col_index_.emplace(journal.name, static_cast<std::uint32_t>(col_labels_.size()));
    if (cnew) col_labels_.push_back(std::move(journal.name));
    std::uint64_t cell =
        (static_cast<std::uint64_t>(rit->second) << 32) | static_cast<std::uint64_t>(cit->second);
    counts_[cell]++;
}

SparseCountMatrix CountMatrixBuilder::build() && {
    std::vector<Triplet> triplets;
    triplets.reserve(counts_.size());
    for (const auto& [cell, count] : counts_)
        triplets.push_back(Triplet{static_cast<std::uint32_t>(cell >> 32),
                                   static_cast<std::uint32_t>(cell & 0xffffffffu), count});
    return SparseCountMatrix(std::move(row_labels_), std::move(col_labels_),
                             std::move(triplets));
}

MatrixStats matrix_stats(const SparseCountMatrix& m) { return m.stats(); }

std::vector<std::pair<std::string, std::uint64_t>> top_cited_journals(
    const SparseCountMatrix& m, std::size_t n) {
    return m.top_cited(n);
}

SparseCountMatrix exclude_journals(const SparseCountMatrix& m,
                                   const std::vector<std::string>& names,
                                   std::vector<std::string>* missing) {
    return m.exclude(names, missing);
}

}  // namespace wikicite
