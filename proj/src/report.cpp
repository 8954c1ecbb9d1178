#include "wikicite/report.hpp"

#include <string>

#include "wikicite/text_util.hpp"

namespace wikicite {

DumpSummary summarize_dump(const SparseCountMatrix& m, std::string dump_id) {
    DumpSummary s;
    s.dump_id = std::move(dump_id);
    s.total_citations = m.total_count();
    s.n_articles = m.n_rows();
    s.n_journal_columns = m.n_cols();
    return s;
}

namespace {

const char* kCss =
    "body{font-family:sans-serif;margin:2em auto;max-width:70em;color:#222}"
    "table{border-collapse:collapse;margin:0.8em 0}"
    "th,td{border:1px solid #bbb;padding:0.25em 0.6em;text-align:left}"
    "th{background:#eee}"
    "td.num{text-align:right}"
    "caption{font-weight:bold;text-align:left;padding:0.3em 0}"
    "p.empty{color:#777;font-style:italic}";

void open_doc(std::string& html) {
    html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    html += "<title>Journal citation overview</title>\n";
    html += "<style>";
    html += kCss;
    html += "</style>\n</head>\n<body>\n";
    html += "<h1>Journal citation overview</h1>\n";
}

void dump_section(std::string& html, const std::vector<DumpSummary>& summaries) {
    html += "<h2>Dumps</h2>\n";
    if (summaries.empty()) {
        html += "<p class=\"empty\">No dump summaries.</p>\n";
        return;
    }
    html += "<table>\n<tr><th>Dump</th><th>Citations</th><th>Articles</th>"
            "<th>Journal columns</th></tr>\n";
    for (const DumpSummary& s : summaries) {
        html += "<tr><td>" + html_escape(s.dump_id) + "</td><td class=\"num\">" +
                std::to_string(s.total_citations) + "</td><td class=\"num\">" +
                std::to_string(s.n_articles) + "</td><td class=\"num\">" +
                std::to_string(s.n_journal_columns) + "</td></tr>\n";
    }
    html += "</table>\n";
}

void top_cited_section(std::string& html, const SparseCountMatrix* matrix, std::size_t top_n) {
    html += "<h2>Most cited journals</h2>\n";
    if (matrix == nullptr || matrix->n_cols() == 0) {
        html += "<p class=\"empty\">No citation matrix.</p>\n";
        return;
    }
    html += "<table>\n<tr><th>Citations</th><th>Journal</th></tr>\n";
    for (const auto& [journal, count] : matrix->top_cited(top_n))
        html += "<tr><td class=\"num\">" + std::to_string(count) + "</td><td>" +
                html_escape(journal) + "</td></tr>\n";
    html += "</table>\n";
}

void cluster_table(std::string& html, const NmfModel& model, int cluster,
                   const std::vector<std::string>& row_labels,
                   const std::vector<std::string>& col_labels, std::size_t top_n) {
    auto hubs = top_loadings(model, cluster, LoadingAxis::Articles, top_n, row_labels,
                             col_labels);
    auto authorities = top_loadings(model, cluster, LoadingAxis::Journals, top_n, row_labels,
                                    col_labels);
    html += "<table class=\"cluster\">\n<caption>k=" + std::to_string(model.k) +
            ", cluster " + std::to_string(cluster + 1) + "</caption>\n";
    html += "<tr><th>Hub article</th><th>Loading</th>"
            "<th>Authoritative journal</th><th>Loading</th></tr>\n";
    std::size_t rows = std::max(hubs.size(), authorities.size());
    for (std::size_t r = 0; r < rows; ++r) {
        html += "<tr>";
        if (r < hubs.size())
            html += "<td>" + html_escape(hubs[r].first) + "</td><td class=\"num\">" +
                    format_fixed(hubs[r].second, 4) + "</td>";
        else
            html += "<td></td><td></td>";
        if (r < authorities.size())
            html += "<td>" + html_escape(authorities[r].first) + "</td><td class=\"num\">" +
                    format_fixed(authorities[r].second, 4) + "</td>";
        else
            html += "<td></td><td></td>";
        html += "</tr>\n";
    }
    html += "</table>\n";
}

void model_section(std::string& html, const std::vector<NmfModel>& models,
                   const std::vector<std::string>& row_labels,
                   const std::vector<std::string>& col_labels, std::size_t top_n) {
    html += "<h2>Clusters</h2>\n";
    if (models.empty()) {
        html += "<p class=\"empty\">No factorization models.</p>\n";
        return;
    }
    for (const NmfModel& model : models) {
        html += "<h3>" + std::to_string(model.k) +
                (model.k == 1 ? " cluster" : " clusters") + "</h3>\n";
        for (int c = 0; c < model.k; ++c)
            cluster_table(html, model, c, row_labels, col_labels, top_n);
    }
}

}  // namespace

std::string render_html_report(const std::vector<NmfModel>& models,
                               const std::vector<std::string>& model_row_labels,
                               const std::vector<std::string>& model_col_labels,
                               const SparseCountMatrix* matrix,
                               const std::vector<DumpSummary>& summaries,
                               std::size_t top_n) {
    std::string html;
    open_doc(html);
    dump_section(html, summaries);
    top_cited_section(html, matrix, top_n);
    model_section(html, models, model_row_labels, model_col_labels, top_n);
    html += "</body>\n</html>\n";
    return html;
}

std::string write_growth_csv(const std::vector<DumpSummary>& summaries) {
    std::string csv = "dump_id,total_citations,n_articles,n_journal_columns\r\n";
    for (const DumpSummary& s : summaries)
        csv += csv_field(s.dump_id) + "," + std::to_string(s.total_citations) + "," +
               std::to_string(s.n_articles) + "," + std::to_string(s.n_journal_columns) +
               "\r\n";
    return csv;
}

}  // namespace wikicite
