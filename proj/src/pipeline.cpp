#include "wikicite/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <ostream>

#include <json.hpp>

#include "wikicite/cluster_bush.hpp"
#include "wikicite/count_matrix.hpp"
#include "wikicite/errors.hpp"
#include "wikicite/journal_lexicon.hpp"
#include "wikicite/nmf.hpp"
#include "wikicite/report.hpp"
#include "wikicite/text_util.hpp"

using nlohmann::json;

namespace wikicite {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string file_hash(const std::filesystem::path& p) { return hex64(fnv1a64_file(p)); }

std::string default_dump_id(const std::filesystem::path& dump_path) {
    std::filesystem::path name = dump_path.filename();
    std::string ext = name.extension().string();
    if (ext == ".bz2" || ext == ".gz") name = name.stem();
    if (name.extension() == ".xml") name = name.stem();
    return name.string();
}

void write_text_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    out << content;
    if (!out) throw DataError("write failed: " + p.string());
}

// Persisted stage fingerprints; a stage is skipped when its fingerprint is
// unchanged and all of its outputs still exist.
class StageLedger {
public:
    StageLedger(std::filesystem::path state_file) : state_file_(std::move(state_file)) {
        std::ifstream in(state_file_, std::ios::binary);
        if (in) {
            try {
                in >> state_;
            } catch (const json::exception&) {
                state_ = json::object();
            }
        }
        if (!state_.is_object()) state_ = json::object();
    }

    bool up_to_date(const std::string& stage, const std::string& fingerprint,
                    const std::vector<std::filesystem::path>& outputs) const {
        if (!state_.contains(stage) || state_[stage] != fingerprint) return false;
        for (const auto& p : outputs)
            if (!std::filesystem::exists(p)) return false;
        return true;
    }

    void record(const std::string& stage, const std::string& fingerprint) {
        state_[stage] = fingerprint;
        write_text_file(state_file_, state_.dump(2) + "\n");
    }

private:
    std::filesystem::path state_file_;
    json state_;
};

struct StageClock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

// The fingerprint is computed lazily so that errors from hashing the
// stage's inputs (a missing dump, say) are attributed to the stage too.
template <typename FingerprintFn, typename Fn>
void run_stage(const std::string& name, json& timings, std::ostream& log, StageLedger& ledger,
               FingerprintFn&& fingerprint_fn,
               const std::vector<std::filesystem::path>& outputs, Fn&& body) {
    StageClock clock;
    std::string fingerprint;
    try {
        fingerprint = fingerprint_fn();
        if (ledger.up_to_date(name, fingerprint, outputs)) {
            log << "[" << name << "] up to date, skipped\n";
            timings.push_back({{"stage", name}, {"skipped", true}, {"seconds", 0.0}});
            return;
        }
        body();
    } catch (const UsageError& e) {
        throw UsageError("stage " + name + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError("stage " + name + ": " + e.what());
    } catch (const Error& e) {
        throw Error("stage " + name + ": " + e.what());
    } catch (const std::exception& e) {
        throw Error("stage " + name + ": " + e.what());
    }
    ledger.record(name, fingerprint);
    timings.push_back({{"stage", name}, {"skipped", false}, {"seconds", clock.seconds()}});
}

std::string model_dir_name(int k) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "k%02d", k);
    return std::string(buf);
}

}  // namespace

void PipelineConfig::validate() const {
    if (dump_path.empty()) throw UsageError("a dump file is required");
    if (lexicon_path.empty()) throw UsageError("a lexicon file is required");
    if (output_dir.empty()) throw UsageError("an output directory is required");
    if (k_min < 1 || k_min > k_max)
        throw UsageError("cluster range [" + std::to_string(k_min) + ", " +
                         std::to_string(k_max) + "] must satisfy 1 <= k_min <= k_max");
    if (iterations < 1) throw UsageError("iterations must be >= 1");
    if (!(min_overlap >= 0.0 && min_overlap <= 1.0))
        throw UsageError("min-overlap must lie in [0, 1]");
    if (labels_per_node < 1 || labels_per_node > 3)
        throw UsageError("labels-per-node must lie in [1, 3]");
    if (top_n < 1) throw UsageError("top-n must be >= 1");
    if (jobs < 1) throw UsageError("jobs must be >= 1");
}

ExtractStats extract_to_jsonl(const std::filesystem::path& dump_path,
                              const std::filesystem::path& out_path,
                              Compression compression) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + out_path.string());

    ExtractStats stats;
    PageStream stream = open_dump_stream(dump_path, compression);
    while (auto page = stream.next()) {
        stats.pages_seen++;
        for (const CitationInstance& c : extract_citations(*page, &stats.wikitext)) {
            json line{{"article", c.article_title},
                      {"journal_raw", c.raw_journal},
                      {"dedup_key", c.dedup_key}};
            out << line.dump() << '\n';
            stats.citations_emitted++;
        }
    }
    stats.dump = stream.diagnostics();
    if (!out) throw DataError("write failed: " + out_path.string());
    return stats;
}

std::vector<CitationInstance> read_citations_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(path.string());
    std::vector<CitationInstance> citations;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
            CitationInstance c;
            c.article_title = obj.at("article").get<std::string>();
            c.raw_journal = obj.value("journal_raw", std::string());
            c.dedup_key = obj.value("dedup_key", std::string());
            if (c.article_title.empty())
                throw DataError("empty article title");
            citations.push_back(std::move(c));
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return citations;
}

void run_pipeline(const PipelineConfig& config, std::ostream& log) {
    config.validate();

    const std::filesystem::path& out = config.output_dir;
    std::filesystem::create_directories(out);
    const std::string dump_id =
        config.dump_id.empty() ? default_dump_id(config.dump_path) : config.dump_id;

    const std::filesystem::path citations_path = out / "citations.jsonl";
    const std::filesystem::path extract_stats_path = out / "extract_stats.json";
    const std::filesystem::path matrix_dir = out / "matrix";
    const std::filesystem::path nmf_matrix_dir =
        config.exclude_journals.empty() ? matrix_dir : out / "matrix_nmf";
    const std::filesystem::path models_dir = out / "models";
    const std::filesystem::path bush_path = out / "bush.svg";
    const std::filesystem::path report_path = out / "report.html";
    const std::filesystem::path growth_path = out / "growth.csv";

    StageLedger ledger(out / "stage_state.json");
    json timings = json::array();

    auto matrix_files = [](const std::filesystem::path& dir) {
        return std::vector<std::filesystem::path>{dir / "matrix.txt", dir / "articles.txt",
                                                  dir / "journals.txt"};
    };
    auto hash_files = [](const std::vector<std::filesystem::path>& files) {
        std::string h;
        for (const auto& f : files) h += file_hash(f) + "|";
        return h;
    };

    // extract: dump -> citations.jsonl
    run_stage("extract", timings, log, ledger,
              [&] {
                  return "v1|dump=" + file_hash(config.dump_path) + "|compression=" +
                         std::to_string(static_cast<int>(config.compression));
              },
              {citations_path, extract_stats_path}, [&] {
                  ExtractStats stats =
                      extract_to_jsonl(config.dump_path, citations_path, config.compression);
                  json j{{"pages_seen", stats.pages_seen},
                         {"citations_emitted", stats.citations_emitted},
                         {"invalid_utf8_replacements", stats.dump.invalid_utf8_replacements},
                         {"pages_empty_title", stats.dump.pages_empty_title},
                         {"unbalanced_openers", stats.wikitext.unbalanced_openers},
                         {"unterminated_refs", stats.wikitext.unterminated_refs},
                         {"skipped_non_article_pages",
                          stats.wikitext.skipped_non_article_pages},
                         {"skipped_untitled_pages", stats.wikitext.skipped_untitled_pages}};
                  write_text_file(extract_stats_path, j.dump(2) + "\n");
                  log << "[extract] " << stats.citations_emitted << " citations from "
                      << stats.pages_seen << " pages\n";
              });

    // matrix: citations + lexicon -> triplet files
    run_stage("matrix", timings, log, ledger,
              [&] {
                  return "v1|citations=" + file_hash(citations_path) +
                         "|lexicon=" + file_hash(config.lexicon_path);
              },
              matrix_files(matrix_dir), [&] {
                  JournalLexicon lexicon = load_lexicon(config.lexicon_path);
                  std::uint64_t dropped = 0;
                  SparseCountMatrix m =
                      build_matrix(read_citations_jsonl(citations_path), lexicon, &dropped);
                  m.save(matrix_dir);
                  MatrixStats s = m.stats();
                  log << "[matrix] " << s.n_rows << " articles x " << s.n_cols
                      << " journals, " << s.nnz << " entries, total " << s.total_count
                      << ", dropped " << dropped << " empty-journal citations\n";
              });

    // exclude: drop configured journal columns for the factorization input
    if (!config.exclude_journals.empty()) {
        std::string names;
        for (const std::string& n : config.exclude_journals) names += n + "|";
        run_stage("exclude", timings, log, ledger,
                  [&] {
                      return "v1|matrix=" + hash_files(matrix_files(matrix_dir)) +
                             "names=" + names;
                  },
                  matrix_files(nmf_matrix_dir), [&] {
                      SparseCountMatrix m = SparseCountMatrix::load(matrix_dir);
                      std::vector<std::string> missing;
                      SparseCountMatrix reduced = m.exclude(config.exclude_journals, &missing);
                      reduced.save(nmf_matrix_dir);
                      for (const std::string& name : missing)
                          log << "[exclude] journal not present: " << name << "\n";
                      log << "[exclude] " << m.n_rows() - reduced.n_rows()
                          << " articles and " << m.n_cols() - reduced.n_cols()
                          << " journal columns removed\n";
                  });
    }

    // nmf: one factorization per k
    std::vector<std::filesystem::path> model_outputs;
    for (int k = config.k_min; k <= config.k_max; ++k) {
        const std::filesystem::path dir = models_dir / model_dir_name(k);
        for (const char* f : {"model.json", "W.bin", "H.bin", "articles.txt", "journals.txt"})
            model_outputs.push_back(dir / f);
    }
    run_stage("nmf", timings, log, ledger,
              [&] {
                  return "v1|matrix=" + hash_files(matrix_files(nmf_matrix_dir)) +
                         "k=" + std::to_string(config.k_min) + ".." +
                         std::to_string(config.k_max) +
                         "|iterations=" + std::to_string(config.iterations) +
                         "|seed=" + std::to_string(config.seed);
              },
              model_outputs, [&] {
                  SparseCountMatrix X = SparseCountMatrix::load(nmf_matrix_dir);
                  std::vector<NmfModel> models =
                      sweep_model_sizes(X, config.k_min, config.k_max, config.iterations,
                                        config.seed, config.jobs);
                  std::filesystem::remove_all(models_dir);
                  for (const NmfModel& model : models) {
                      save_model(model, models_dir / model_dir_name(model.k), X.row_labels(),
                                 X.col_labels());
                      log << "[nmf] k=" << model.k << " error "
                          << format_fixed(model.final_error, 6) << " after "
                          << model.iterations_run << " iterations\n";
                  }
              });

    // bush: overlap graph across consecutive model sizes
    run_stage("bush", timings, log, ledger,
              [&] {
                  return "v1|models=" + hash_files(model_outputs) +
                         "min_overlap=" + format_fixed(config.min_overlap, 6) +
                         "|labels=" + std::to_string(config.labels_per_node);
              },
              {bush_path}, [&] {
                  std::vector<LoadedModel> loaded = load_models(models_dir);
                  std::vector<NmfModel> models;
                  models.reserve(loaded.size());
                  for (LoadedModel& lm : loaded) models.push_back(std::move(lm.model));
                  BushOptions options;
                  options.min_overlap = config.min_overlap;
                  options.labels_per_node = config.labels_per_node;
                  ClusterBush bush =
                      build_bush(models, loaded.empty() ? std::vector<std::string>{}
                                                        : loaded.front().row_labels,
                                 options);
                  write_text_file(bush_path, render_bush_svg(bush));
                  log << "[bush] " << bush.nodes.size() << " nodes, " << bush.edges.size()
                      << " edges\n";
              });

    // report: overview page + growth CSV
    run_stage("report", timings, log, ledger,
              [&] {
                  return "v1|matrix=" + hash_files(matrix_files(matrix_dir)) +
                         "models=" + hash_files(model_outputs) +
                         "top_n=" + std::to_string(config.top_n) + "|dump_id=" + dump_id;
              },
              {report_path, growth_path}, [&] {
                  SparseCountMatrix full = SparseCountMatrix::load(matrix_dir);
                  std::vector<LoadedModel> loaded = load_models(models_dir);
                  std::vector<NmfModel> models;
                  models.reserve(loaded.size());
                  for (LoadedModel& lm : loaded) models.push_back(std::move(lm.model));
                  std::vector<DumpSummary> summaries{summarize_dump(full, dump_id)};
                  std::string html = render_html_report(
                      models, loaded.empty() ? std::vector<std::string>{}
                                             : loaded.front().row_labels,
                      loaded.empty() ? std::vector<std::string>{}
                                     : loaded.front().col_labels,
                      &full, summaries, config.top_n);
                  write_text_file(report_path, html);
                  write_text_file(growth_path, write_growth_csv(summaries));
                  log << "[report] " << report_path.string() << "\n";
              });

    json run{{"dump", config.dump_path.string()},
             {"lexicon", config.lexicon_path.string()},
             {"output_dir", out.string()},
             {"dump_id", dump_id},
             {"compression", static_cast<int>(config.compression)},
             {"exclude_journals", config.exclude_journals},
             {"k_min", config.k_min},
             {"k_max", config.k_max},
             {"iterations", config.iterations},
             {"seed", config.seed},
             {"min_overlap", config.min_overlap},
             {"labels_per_node", config.labels_per_node},
             {"top_n", config.top_n},
             {"jobs", config.jobs},
             {"stages", timings}};
    write_text_file(out / "run.json", run.dump(2) + "\n");
}

}  // namespace wikicite
