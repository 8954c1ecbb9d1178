#include <doctest.h>

#include <string>
#include <vector>

#include "wikicite/count_matrix.hpp"
#include "wikicite/report.hpp"

using namespace wikicite;

namespace {

const JournalLexicon kNoLexicon;

SparseCountMatrix three_citation_fixture() {
    CountMatrixBuilder builder(kNoLexicon);
    builder.add("A", "Nature");
    builder.add("A", "Nature");
    builder.add("B", "Cell");
    return std::move(builder).build();
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        n++;
    return n;
}

NmfModel small_k2_model() {
    NmfModel model;
    model.k = 2;
    model.W = Eigen::MatrixXd(2, 2);
    model.W << 0.9, 0.1, 0.2, 0.8;
    model.H = Eigen::MatrixXd(2, 2);
    model.H << 1.5, 0.1, 0.2, 0.7;
    model.final_error = 0.25;
    return model;
}

}  // namespace

TEST_CASE("summaries mirror the matrix statistics") {
    DumpSummary s = summarize_dump(three_citation_fixture(), "2008-03-12");
    CHECK(s.dump_id == "2008-03-12");
    CHECK(s.total_citations == 3);
    CHECK(s.n_articles == 2);
    CHECK(s.n_journal_columns == 2);

    DumpSummary empty = summarize_dump(SparseCountMatrix(), "none");
    CHECK(empty.total_citations == 0);
    CHECK(empty.n_articles == 0);
    CHECK(empty.n_journal_columns == 0);
}

TEST_CASE("the report renders one table per cluster") {
    SparseCountMatrix m = three_citation_fixture();
    std::vector<NmfModel> models{small_k2_model()};
    DumpSummary summary = summarize_dump(m, "fixture");
    std::string html = render_html_report(models, m.row_labels(), m.col_labels(), &m,
                                          {summary}, 10);
    CHECK(count_occurrences(html, "<table class=\"cluster\">") == 2);
    CHECK(html.find("<caption>k=2, cluster 1</caption>") != std::string::npos);
    CHECK(html.find("<caption>k=2, cluster 2</caption>") != std::string::npos);
    CHECK(html.find("fixture") != std::string::npos);
}

TEST_CASE("empty inputs still produce a complete page") {
    std::string html = render_html_report({}, {}, {}, nullptr, {}, 5);
    CHECK(html.find("<!DOCTYPE html>") != std::string::npos);
    CHECK(html.find("No dump summaries.") != std::string::npos);
    CHECK(html.find("No citation matrix.") != std::string::npos);
    CHECK(html.find("No factorization models.") != std::string::npos);
    CHECK(html.find("</html>") != std::string::npos);
}

TEST_CASE("data strings are escaped before they reach the page") {
    CountMatrixBuilder builder(kNoLexicon);
    builder.add("<script>alert(1)</script>", "Journal & Sons <em>");
    SparseCountMatrix m = std::move(builder).build();
    NmfModel model;
    model.k = 1;
    model.W = Eigen::MatrixXd::Ones(1, 1);
    model.H = Eigen::MatrixXd::Ones(1, 1);
    std::string html = render_html_report({model}, m.row_labels(), m.col_labels(), &m,
                                          {summarize_dump(m, "d<1>")}, 5);
    CHECK(html.find("<script>alert") == std::string::npos);
    CHECK(html.find("&lt;script&gt;alert(1)&lt;/script&gt;") != std::string::npos);
    CHECK(html.find("Journal &amp; Sons &lt;em&gt;") != std::string::npos);
    CHECK(html.find("d&lt;1&gt;") != std::string::npos);
}

TEST_CASE("the top cited table preserves ranking order") {
    SparseCountMatrix m = three_citation_fixture();
    std::string html = render_html_report({}, {}, {}, &m, {}, 10);
    auto ranked = top_cited_journals(m, 10);
    std::size_t prev = 0;
    for (const auto& [journal, count] : ranked) {
        std::string row =
            "<td class=\"num\">" + std::to_string(count) + "</td><td>" + journal + "</td>";
        std::size_t pos = html.find(row);
        CHECK(pos != std::string::npos);
        CHECK(pos > prev);
        prev = pos;
    }
}

TEST_CASE("the top-n limit truncates the journal table") {
    SparseCountMatrix m = three_citation_fixture();
    std::string html = render_html_report({}, {}, {}, &m, {}, 1);
    CHECK(html.find("Nature") != std::string::npos);
    CHECK(html.find("Cell") == std::string::npos);
}

TEST_CASE("rendering is deterministic") {
    SparseCountMatrix m = three_citation_fixture();
    std::vector<NmfModel> models{small_k2_model()};
    std::string a = render_html_report(models, m.row_labels(), m.col_labels(), &m,
                                       {summarize_dump(m, "x")}, 3);
    std::string b = render_html_report(models, m.row_labels(), m.col_labels(), &m,
                                       {summarize_dump(m, "x")}, 3);
    CHECK(a == b);
}

TEST_CASE("growth csv has a header and one row per summary") {
    DumpSummary a{"2007-10", 74776, 20000, 15000};
    DumpSummary b{"2008-03", 228593, 23595, 18194};
    std::string csv = write_growth_csv({a, b});
    CHECK(count_occurrences(csv, "\r\n") == 3);
    CHECK(csv.rfind("dump_id,total_citations,n_articles,n_journal_columns\r\n", 0) == 0);
    CHECK(csv.find("2007-10,74776,20000,15000\r\n") != std::string::npos);
    CHECK(csv.find("2008-03,228593,23595,18194\r\n") != std::string::npos);
}

TEST_CASE("csv fields with commas or quotes are quoted") {
    DumpSummary odd{"march, \"final\" cut", 1, 2, 3};
    std::string csv = write_growth_csv({odd});
    CHECK(csv.find("\"march, \"\"final\"\" cut\",1,2,3\r\n") != std::string::npos);
}

TEST_CASE("an empty summary list yields only the header") {
    CHECK(write_growth_csv({}) == "dump_id,total_citations,n_articles,n_journal_columns\r\n");
}
