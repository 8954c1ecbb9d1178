#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wikicite/cluster_bush.hpp"
#include "wikicite/count_matrix.hpp"
#include "wikicite/errors.hpp"
#include "wikicite/journal_lexicon.hpp"
#include "wikicite/nmf.hpp"
#include "wikicite/pipeline.hpp"
#include "wikicite/report.hpp"
#include "wikicite/text_util.hpp"

namespace {

wikicite::Compression parse_compression(const std::string& s) {
    if (s == "none") return wikicite::Compression::None;
    if (s == "bzip2") return wikicite::Compression::Bzip2;
    return wikicite::Compression::Auto;
}

std::string model_dir_name(int k) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "k%02d", k);
    return std::string(buf);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw wikicite::DataError("cannot write " + path);
    out << content;
    if (!out) throw wikicite::DataError("write failed: " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Builds article x journal citation matrices from Wikipedia dumps,"
                 " factorizes them and renders cluster overviews"};
    app.require_subcommand(1);
    const auto compression_values = CLI::IsMember({"auto", "none", "bzip2"});

    // extract
    std::string x_dump, x_out, x_stats, x_compression = "auto";
    auto* extract = app.add_subcommand(
        "extract", "Stream a dump into one JSON object per citation");
    extract->add_option("--dump", x_dump, "XML dump, plain or .bz2")->required();
    extract->add_option("--out", x_out, "Citation JSON-lines output")->required();
    extract->add_option("--stats", x_stats, "Also write extraction counters as JSON");
    extract->add_option("--compression", x_compression)->check(compression_values);
    extract->callback([&] {
        wikicite::ExtractStats stats =
            wikicite::extract_to_jsonl(x_dump, x_out, parse_compression(x_compression));
        std::cout << stats.citations_emitted << " citations from " << stats.pages_seen
                  << " pages\n";
        if (!x_stats.empty()) {
            nlohmann::json j{
                {"pages_seen", stats.pages_seen},
                {"citations_emitted", stats.citations_emitted},
                {"invalid_utf8_replacements", stats.dump.invalid_utf8_replacements},
                {"pages_empty_title", stats.dump.pages_empty_title},
                {"unbalanced_openers", stats.wikitext.unbalanced_openers},
                {"unterminated_refs", stats.wikitext.unterminated_refs},
                {"skipped_non_article_pages", stats.wikitext.skipped_non_article_pages},
                {"skipped_untitled_pages", stats.wikitext.skipped_untitled_pages}};
            write_file(x_stats, j.dump(2) + "\n");
        }
    });

    // matrix
    std::string m_citations, m_lexicon, m_out_dir;
    auto* matrix = app.add_subcommand(
        "matrix", "Build the sparse count matrix from citation JSON lines");
    matrix->add_option("--citations", m_citations, "JSON-lines file from extract")
        ->required();
    matrix->add_option("--lexicon", m_lexicon, "Journal name lexicon XML")->required();
    matrix->add_option("--out-dir", m_out_dir, "Directory for matrix.txt and label files")
        ->required();
    matrix->callback([&] {
        wikicite::JournalLexicon lexicon = wikicite::load_lexicon(m_lexicon);
        std::uint64_t dropped = 0;
        wikicite::SparseCountMatrix m = wikicite::build_matrix(
            wikicite::read_citations_jsonl(m_citations), lexicon, &dropped);
        m.save(m_out_dir);
        wikicite::MatrixStats s = m.stats();
        std::cout << s.n_rows << " articles x " << s.n_cols << " journals, " << s.nnz
                  << " entries, total " << s.total_count << ", dropped " << dropped
                  << " empty-journal citations\n";
    });

    // nmf
    std::string n_matrix_dir, n_out_dir;
    int n_k_min = 1, n_k_max = 20, n_jobs = 1;
    long n_iterations = 50000;
    std::uint64_t n_seed = 0;
    std::vector<std::string> n_exclude;
    auto* nmf = app.add_subcommand(
        "nmf", "Factorize the count matrix once per cluster count");
    nmf->add_option("--matrix-dir", n_matrix_dir)->required();
    nmf->add_option("--out-dir", n_out_dir, "Directory for one model directory per k")
        ->required();
    nmf->add_option("--k-min", n_k_min);
    nmf->add_option("--k-max", n_k_max);
    nmf->add_option("--iterations", n_iterations);
    nmf->add_option("--seed", n_seed);
    nmf->add_option("--jobs", n_jobs, "Concurrent factorizations");
    nmf->add_option("--exclude", n_exclude, "Journal columns to drop before factorizing")
        ->delimiter(',');
    nmf->callback([&] {
        wikicite::SparseCountMatrix X = wikicite::SparseCountMatrix::load(n_matrix_dir);
        if (!n_exclude.empty()) {
            std::vector<std::string> missing;
            X = X.exclude(n_exclude, &missing);
            for (const std::string& name : missing)
                std::cerr << "warning: journal not present: " << name << "\n";
        }
        std::vector<wikicite::NmfModel> models =
            wikicite::sweep_model_sizes(X, n_k_min, n_k_max, n_iterations, n_seed, n_jobs);
        for (const wikicite::NmfModel& model : models) {
            wikicite::save_model(model,
                                 std::filesystem::path(n_out_dir) / model_dir_name(model.k),
                                 X.row_labels(), X.col_labels());
            std::cout << "k=" << model.k << " error "
                      << wikicite::format_fixed(model.final_error, 6) << " after "
                      << model.iterations_run << " iterations\n";
        }
    });

    // bush
    std::string b_models_dir, b_out;
    double b_min_overlap = 0.1;
    int b_labels = 1;
    auto* bush = app.add_subcommand(
        "bush", "Render the cluster overlap graph across model sizes as SVG");
    bush->add_option("--models-dir", b_models_dir)->required();
    bush->add_option("--out", b_out, "SVG output path")->required();
    bush->add_option("--min-overlap", b_min_overlap)->check(CLI::Range(0.0, 1.0));
    bush->add_option("--labels-per-node", b_labels)->check(CLI::Range(1, 3));
    bush->callback([&] {
        std::vector<wikicite::LoadedModel> loaded = wikicite::load_models(b_models_dir);
        std::vector<wikicite::NmfModel> models;
        models.reserve(loaded.size());
        for (wikicite::LoadedModel& lm : loaded) models.push_back(std::move(lm.model));
        wikicite::BushOptions options;
        options.min_overlap = b_min_overlap;
        options.labels_per_node = b_labels;
        wikicite::ClusterBush graph = wikicite::build_bush(
            models,
            loaded.empty() ? std::vector<std::string>{} : loaded.front().row_labels,
            options);
        write_file(b_out, wikicite::render_bush_svg(graph));
        std::cout << graph.nodes.size() << " nodes, " << graph.edges.size() << " edges\n";
    });

    // report
    std::string r_matrix_dir, r_models_dir, r_out, r_growth, r_dump_id = "dump";
    std::size_t r_top_n = 12;
    auto* report = app.add_subcommand(
        "report", "Write the HTML overview and the growth CSV");
    report->add_option("--matrix-dir", r_matrix_dir)->required();
    report->add_option("--models-dir", r_models_dir);
    report->add_option("--out", r_out, "HTML output path")->required();
    report->add_option("--growth-csv", r_growth, "CSV output path");
    report->add_option("--top-n", r_top_n)->check(CLI::PositiveNumber);
    report->add_option("--dump-id", r_dump_id, "Label for the dump in tables");
    report->callback([&] {
        wikicite::SparseCountMatrix full = wikicite::SparseCountMatrix::load(r_matrix_dir);
        std::vector<wikicite::LoadedModel> loaded;
        if (!r_models_dir.empty()) loaded = wikicite::load_models(r_models_dir);
        std::vector<wikicite::NmfModel> models;
        models.reserve(loaded.size());
        for (wikicite::LoadedModel& lm : loaded) models.push_back(std::move(lm.model));
        std::vector<wikicite::DumpSummary> summaries{
            wikicite::summarize_dump(full, r_dump_id)};
        write_file(r_out, wikicite::render_html_report(
                              models,
                              loaded.empty() ? std::vector<std::string>{}
                                             : loaded.front().row_labels,
                              loaded.empty() ? std::vector<std::string>{}
                                             : loaded.front().col_labels,
                              &full, summaries, r_top_n));
        if (!r_growth.empty()) write_file(r_growth, wikicite::write_growth_csv(summaries));
        std::cout << r_out << "\n";
    });

    // run
    wikicite::PipelineConfig config;
    std::string p_dump, p_lexicon, p_output_dir, p_compression = "auto";
    auto* run = app.add_subcommand("run", "Full pipeline: extract through report");
    run->set_config("--config", "", "Read options from a key=value file");
    run->add_option("--dump", p_dump, "XML dump, plain or .bz2")->required();
    run->add_option("--lexicon", p_lexicon, "Journal name lexicon XML")->required();
    run->add_option("--output-dir", p_output_dir, "Artifact directory")
        ->envname("WIKICITE_OUTPUT_DIR")
        ->required();
    run->add_option("--dump-id", config.dump_id, "Defaults to the dump filename stem");
    run->add_option("--compression", p_compression)->check(compression_values);
    run->add_option("--exclude", config.exclude_journals,
                    "Journal columns dropped before factorizing")
        ->delimiter(',');
    run->add_option("--k-min", config.k_min);
    run->add_option("--k-max", config.k_max);
    run->add_option("--iterations", config.iterations);
    run->add_option("--seed", config.seed);
    run->add_option("--min-overlap", config.min_overlap);
    run->add_option("--labels-per-node", config.labels_per_node);
    run->add_option("--top-n", config.top_n);
    run->add_option("--jobs", config.jobs, "Concurrent factorizations");
    run->callback([&] {
        config.dump_path = p_dump;
        config.lexicon_path = p_lexicon;
        config.output_dir = p_output_dir;
        config.compression = parse_compression(p_compression);
        wikicite::run_pipeline(config, std::cout);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const wikicite::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const wikicite::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
