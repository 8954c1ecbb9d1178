#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "wikicite/cluster_bush.hpp"
#include "wikicite/count_matrix.hpp"
#include "wikicite/errors.hpp"
#include "wikicite/journal_lexicon.hpp"
#include "wikicite/nmf.hpp"
#include "wikicite/pipeline.hpp"
#include "wikicite/report.hpp"
#include "wikicite/wikitext.hpp"

namespace py = pybind11;
using namespace wikicite;

PYBIND11_MODULE(_wikicite, m) {
    m.doc() = "Article x journal citation matrices from Wikipedia dumps, "
              "factorized into soft clusters";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<UsageError>(m, "UsageError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());

    py::enum_<Compression>(m, "Compression")
        .value("none", Compression::None)
        .value("bzip2", Compression::Bzip2)
        .value("auto", Compression::Auto);

    py::class_<WikiPage>(m, "WikiPage")
        .def(py::init([](std::string title, int ns, std::string wikitext) {
                 WikiPage p;
                 p.title = std::move(title);
                 p.ns = ns;
                 p.wikitext = std::move(wikitext);
                 return p;
             }),
             py::arg("title"), py::arg("ns") = 0, py::arg("wikitext") = "")
        .def_readwrite("title", &WikiPage::title)
        .def_readwrite("ns", &WikiPage::ns)
        .def_readwrite("wikitext", &WikiPage::wikitext);

    py::class_<TemplateParam>(m, "TemplateParam")
        .def_readonly("key", &TemplateParam::key)
        .def_readonly("value", &TemplateParam::value);

    py::class_<TemplateInstance>(m, "TemplateInstance")
        .def_readonly("name", &TemplateInstance::name)
        .def_readonly("params", &TemplateInstance::params)
        .def_readonly("span_begin", &TemplateInstance::span_begin)
        .def_readonly("span_end", &TemplateInstance::span_end)
        .def("param", [](const TemplateInstance& t, const std::string& key) {
            auto v = t.param(key);
            return v ? py::cast(std::string(*v)) : py::none().cast<py::object>();
        });

    py::class_<CitationInstance>(m, "CitationInstance")
        .def_readonly("article_title", &CitationInstance::article_title)
        .def_readonly("raw_journal", &CitationInstance::raw_journal)
        .def_readonly("dedup_key", &CitationInstance::dedup_key);

    m.def("parse_templates",
          [](const std::string& text) { return parse_templates(text); });
    m.def("extract_citations",
          [](const WikiPage& page) { return extract_citations(page); });
    m.def("clean_field_value", &clean_field_value);
    m.def("strip_html_comments", &strip_html_comments);

    py::class_<NormalizedJournal>(m, "NormalizedJournal")
        .def_readonly("name", &NormalizedJournal::name)
        .def_readonly("matched", &NormalizedJournal::matched);

    py::class_<JournalLexicon>(m, "JournalLexicon")
        .def_static("load", &JournalLexicon::load, py::arg("path"))
        .def_static("from_entries",
                    [](const std::vector<std::pair<std::string, std::vector<std::string>>>&
                           entries) {
                        std::vector<LexiconEntry> converted;
                        converted.reserve(entries.size());
                        for (const auto& [canonical, variants] : entries)
                            converted.push_back(LexiconEntry{canonical, variants});
                        return JournalLexicon::from_entries(std::move(converted));
                    })
        .def("normalize", &JournalLexicon::normalize, py::arg("raw"))
        .def("__len__", &JournalLexicon::size);

    py::class_<MatrixStats>(m, "MatrixStats")
        .def_readonly("n_rows", &MatrixStats::n_rows)
        .def_readonly("n_cols", &MatrixStats::n_cols)
        .def_readonly("nnz", &MatrixStats::nnz)
        .def_readonly("total_count", &MatrixStats::total_count)
        .def_readonly("density", &MatrixStats::density);

    py::class_<SparseCountMatrix>(m, "SparseCountMatrix")
        .def_static("load", &SparseCountMatrix::load, py::arg("dir"))
        .def("save", &SparseCountMatrix::save, py::arg("dir"))
        .def_property_readonly("n_rows", &SparseCountMatrix::n_rows)
        .def_property_readonly("n_cols", &SparseCountMatrix::n_cols)
        .def_property_readonly("nnz", &SparseCountMatrix::nnz)
        .def_property_readonly("total_count", &SparseCountMatrix::total_count)
        .def_property_readonly("row_labels",
                               [](const SparseCountMatrix& m) { return m.row_labels(); })
        .def_property_readonly("col_labels",
                               [](const SparseCountMatrix& m) { return m.col_labels(); })
        .def("at", &SparseCountMatrix::at, py::arg("row"), py::arg("col"))
        .def("stats", &SparseCountMatrix::stats)
        .def("top_cited", &SparseCountMatrix::top_cited, py::arg("n"))
        .def("exclude", [](const SparseCountMatrix& m, const std::vector<std::string>& names) {
            return m.exclude(names);
        });

    m.def("build_matrix",
          [](const std::vector<std::pair<std::string, std::string>>& citations,
             const JournalLexicon& lexicon) {
              CountMatrixBuilder builder(lexicon);
              for (const auto& [article, journal] : citations) builder.add(article, journal);
              std::uint64_t dropped = builder.dropped_empty_journal();
              return py::make_tuple(std::move(builder).build(), dropped);
          },
          py::arg("citations"), py::arg("lexicon"),
          "Builds the count matrix from (article, raw_journal) pairs; returns "
          "(matrix, dropped_empty_journal)");

    py::class_<NmfModel>(m, "NmfModel")
        .def_readonly("k", &NmfModel::k)
        .def_readonly("W", &NmfModel::W)
        .def_readonly("H", &NmfModel::H)
        .def_readonly("iterations_run", &NmfModel::iterations_run)
        .def_readonly("final_error", &NmfModel::final_error)
        .def_readonly("seed", &NmfModel::seed);

    py::enum_<LoadingAxis>(m, "LoadingAxis")
        .value("articles", LoadingAxis::Articles)
        .value("journals", LoadingAxis::Journals);

    m.def("factorize",
          [](const SparseCountMatrix& X, int k, long iterations, std::uint64_t seed,
             double eps) {
              NmfOptions options;
              options.eps = eps;
              return factorize(X, k, iterations, seed, options);
          },
          py::arg("X"), py::arg("k"), py::arg("iterations") = 50000, py::arg("seed") = 0,
          py::arg("eps") = 1e-12, py::call_guard<py::gil_scoped_release>());
    m.def("sweep_model_sizes",
          [](const SparseCountMatrix& X, int k_min, int k_max, long iterations,
             std::uint64_t seed, int jobs) {
              return sweep_model_sizes(X, k_min, k_max, iterations, seed, jobs);
          },
          py::arg("X"), py::arg("k_min"), py::arg("k_max"), py::arg("iterations") = 50000,
          py::arg("seed") = 0, py::arg("jobs") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("multiplicative_step", &multiplicative_step, py::arg("X"), py::arg("W"),
          py::arg("H"), py::arg("eps") = 1e-12);
    m.def("reconstruction_error", &reconstruction_error, py::arg("X"), py::arg("W"),
          py::arg("H"));
    m.def("top_loadings", &top_loadings, py::arg("model"), py::arg("cluster"),
          py::arg("axis"), py::arg("n"), py::arg("row_labels"), py::arg("col_labels"));
    m.def("save_model", &save_model, py::arg("model"), py::arg("dir"), py::arg("row_labels"),
          py::arg("col_labels"));
    m.def("load_model", [](const std::filesystem::path& dir) {
        LoadedModel loaded = load_model(dir);
        return py::make_tuple(std::move(loaded.model), std::move(loaded.row_labels),
                              std::move(loaded.col_labels));
    });

    py::class_<BushNode>(m, "BushNode")
        .def_readonly("run_k", &BushNode::run_k)
        .def_readonly("cluster", &BushNode::cluster)
        .def_readonly("labels", &BushNode::labels)
        .def_readonly("mass", &BushNode::mass);

    py::class_<BushEdge>(m, "BushEdge")
        .def_readonly("a", &BushEdge::a)
        .def_readonly("b", &BushEdge::b)
        .def_readonly("overlap", &BushEdge::overlap);

    py::class_<ClusterBush>(m, "ClusterBush")
        .def_readonly("nodes", &ClusterBush::nodes)
        .def_readonly("edges", &ClusterBush::edges);

    m.def("cluster_overlap", &cluster_overlap, py::arg("a"), py::arg("i"), py::arg("b"),
          py::arg("j"));
    m.def("build_bush",
          [](const std::vector<NmfModel>& models, const std::vector<std::string>& row_labels,
             double min_overlap, int labels_per_node) {
              BushOptions options;
              options.min_overlap = min_overlap;
              options.labels_per_node = labels_per_node;
              return build_bush(models, row_labels, options);
          },
          py::arg("models"), py::arg("row_labels"), py::arg("min_overlap") = 0.1,
          py::arg("labels_per_node") = 1);
    m.def("render_bush_svg",
          [](const ClusterBush& bush) { return render_bush_svg(bush); }, py::arg("bush"));

    py::class_<DumpSummary>(m, "DumpSummary")
        .def_readonly("dump_id", &DumpSummary::dump_id)
        .def_readonly("total_citations", &DumpSummary::total_citations)
        .def_readonly("n_articles", &DumpSummary::n_articles)
        .def_readonly("n_journal_columns", &DumpSummary::n_journal_columns);

    m.def("summarize_dump", &summarize_dump, py::arg("matrix"), py::arg("dump_id"));
    m.def("render_html_report",
          [](const std::vector<NmfModel>& models, const std::vector<std::string>& row_labels,
             const std::vector<std::string>& col_labels, const SparseCountMatrix* matrix,
             const std::vector<DumpSummary>& summaries, std::size_t top_n) {
              return render_html_report(models, row_labels, col_labels, matrix, summaries,
                                        top_n);
          },
          py::arg("models"), py::arg("row_labels"), py::arg("col_labels"),
          py::arg("matrix") = nullptr, py::arg("summaries") = std::vector<DumpSummary>{},
          py::arg("top_n") = 12);
    m.def("write_growth_csv", &write_growth_csv, py::arg("summaries"));

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("dump_path", &PipelineConfig::dump_path)
        .def_readwrite("lexicon_path", &PipelineConfig::lexicon_path)
        .def_readwrite("output_dir", &PipelineConfig::output_dir)
        .def_readwrite("dump_id", &PipelineConfig::dump_id)
        .def_readwrite("compression", &PipelineConfig::compression)
        .def_readwrite("exclude_journals", &PipelineConfig::exclude_journals)
        .def_readwrite("k_min", &PipelineConfig::k_min)
        .def_readwrite("k_max", &PipelineConfig::k_max)
        .def_readwrite("iterations", &PipelineConfig::iterations)
        .def_readwrite("seed", &PipelineConfig::seed)
        .def_readwrite("min_overlap", &PipelineConfig::min_overlap)
        .def_readwrite("labels_per_node", &PipelineConfig::labels_per_node)
        .def_readwrite("top_n", &PipelineConfig::top_n)
        .def_readwrite("jobs", &PipelineConfig::jobs)
        .def("validate", &PipelineConfig::validate);

    m.def("extract_citations_file",
          [](const std::filesystem::path& dump, const std::filesystem::path& out,
             Compression compression) {
              ExtractStats stats;
              {
                  py::gil_scoped_release release;
                  stats = extract_to_jsonl(dump, out, compression);
              }
              py::dict d;
              d["pages_seen"] = stats.pages_seen;
              d["citations_emitted"] = stats.citations_emitted;
              d["invalid_utf8_replacements"] = stats.dump.invalid_utf8_replacements;
              d["unbalanced_openers"] = stats.wikitext.unbalanced_openers;
              d["skipped_non_article_pages"] = stats.wikitext.skipped_non_article_pages;
              return d;
          },
          py::arg("dump"), py::arg("out"), py::arg("compression") = Compression::Auto);

    m.def("run_pipeline",
          [](const PipelineConfig& config) {
              std::ostringstream log;
              run_pipeline(config, log);
              return log.str();
          },
          py::arg("config"), py::call_guard<py::gil_scoped_release>(),
          "Runs extract through report; returns the stage log");
}
