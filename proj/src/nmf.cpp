#include "wikicite/nmf.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "wikicite/errors.hpp"
#include "wikicite/text_util.hpp"

static_assert(std::endian::native == std::endian::little,
              "model binaries are little-endian; add byte swapping for this target");

namespace wikicite {

namespace {

void check_shapes(const SparseCountMatrix& X, const Eigen::MatrixXd& W,
                  const Eigen::MatrixXd& H) {
    if (W.rows() != static_cast<Eigen::Index>(X.n_rows()) ||
        H.cols() != static_cast<Eigen::Index>(X.n_cols()) || W.cols() != H.rows())
        throw ShapeMismatchError(
            "factor shapes do not conform: X " + std::to_string(X.n_rows()) + "x" +
            std::to_string(X.n_cols()) + ", W " + std::to_string(W.rows()) + "x" +
            std::to_string(W.cols()) + ", H " + std::to_string(H.rows()) + "x" +
            std::to_string(H.cols()));
}

// k x n_cols product W'X, accumulated over X's nonzeros in row-major order.
Eigen::MatrixXd wt_times_x(const SparseCountMatrix& X, const Eigen::MatrixXd& W) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(W.cols(), static_cast<Eigen::Index>(X.n_cols()));
    for (const Triplet& t : X.triplets())
        out.col(t.col) += static_cast<double>(t.count) * W.row(t.row).transpose();
    return out;
}

// n_rows x k product XH', accumulated over X's nonzeros in row-major order.
Eigen::MatrixXd x_times_ht(const SparseCountMatrix& X, const Eigen::MatrixXd& H) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(X.n_rows()), H.rows());
    for (const Triplet& t : X.triplets())
        out.row(t.row) += static_cast<double>(t.count) * H.col(t.col).transpose();
    return out;
}

void step_in_place(const SparseCountMatrix& X, Eigen::MatrixXd& W, Eigen::MatrixXd& H,
                   double eps) {
    H = (H.array() * wt_times_x(X, W).array() /
         (((W.transpose() * W) * H).array() + eps))
            .matrix();
    W = (W.array() * x_times_ht(X, H).array() /
         ((W * (H * H.transpose())).array() + eps))
            .matrix();
}

// Uniform on (0, 1]: 53-bit mantissa draw shifted away from zero so
// multiplicative updates never start at a structural zero.
double unit_open(std::mt19937_64& gen) {
    return static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;
}

// Draw order is part of the reproducibility contract: H row-major first,
// then W row-major, all from one mt19937_64 stream.
void seeded_init(Eigen::MatrixXd& W, Eigen::MatrixXd& H, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    for (Eigen::Index r = 0; r < H.rows(); ++r)
        for (Eigen::Index c = 0; c < H.cols(); ++c) H(r, c) = unit_open(gen);
    for (Eigen::Index r = 0; r < W.rows(); ++r)
        for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = unit_open(gen);
}

void write_matrix_row_major(const std::filesystem::path& p, const Eigen::MatrixXd& m) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) throw DataError("write failed: " + p.string());
}

Eigen::MatrixXd read_matrix_row_major(const std::filesystem::path& p, Eigen::Index rows,
                                      Eigen::Index cols) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FileNotFoundError(p.string());
    Eigen::MatrixXd m(rows, cols);
    std::vector<double> row(static_cast<std::size_t>(cols));
    for (Eigen::Index r = 0; r < rows; ++r) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (in.gcount() != static_cast<std::streamsize>(row.size() * sizeof(double)))
            throw DataError("truncated matrix file: " + p.string());
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    char extra;
    if (in.read(&extra, 1), in.gcount() != 0)
        throw DataError("trailing bytes in matrix file: " + p.string());
    return m;
}

void write_label_file(const std::filesystem::path& p, const std::vector<std::string>& labels) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    for (const std::string& l : labels) out << l << '\n';
    if (!out) throw DataError("write failed: " + p.string());
}

std::vector<std::string> read_label_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FileNotFoundError(p.string());
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        labels.push_back(line);
    }
    return labels;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> multiplicative_step(const SparseCountMatrix& X,
                                                                const Eigen::MatrixXd& W,
                                                                const Eigen::MatrixXd& H,
                                                                double eps) {
    check_shapes(X, W, H);
    Eigen::MatrixXd w = W, h = H;
    step_in_place(X, w, h, eps);
    return {std::move(w), std::move(h)};
}

double reconstruction_error(const SparseCountMatrix& X, const Eigen::MatrixXd& W,
                            const Eigen::MatrixXd& H) {
    check_shapes(X, W, H);
    double norm_x2 = 0.0, inner = 0.0;
    for (const Triplet& t : X.triplets()) {
        double v = static_cast<double>(t.count);
        norm_x2 += v * v;
        inner += v * W.row(t.row).dot(H.col(t.col));
    }
    Eigen::MatrixXd wtw = W.transpose() * W;
    Eigen::MatrixXd hht = H * H.transpose();
    double norm_wh2 = wtw.cwiseProduct(hht).sum();
    return std::sqrt(std::max(0.0, norm_x2 - 2.0 * inner + norm_wh2));
}

NmfModel factorize(const SparseCountMatrix& X, int k, long iterations, std::uint64_t seed,
                   const NmfOptions& options) {
    if (X.nnz() == 0) throw EmptyMatrixError("cannot factorize a matrix with no entries");
    long long max_k = static_cast<long long>(std::min(X.n_rows(), X.n_cols()));
    if (k < 1 || k > max_k)
        throw RankTooLargeError("cluster count " + std::to_string(k) +
                                " outside [1, " + std::to_string(max_k) + "]");
    if (iterations < 1) throw UsageError("iterations must be >= 1");

    NmfModel model;
    model.k = k;
    model.seed = seed;
    model.W.resize(static_cast<Eigen::Index>(X.n_rows()), k);
    model.H.resize(k, static_cast<Eigen::Index>(X.n_cols()));
    seeded_init(model.W, model.H, seed);

    double last_checked = -1.0;
    long sweep = 0;
    for (; sweep < iterations; ++sweep) {
        step_in_place(X, model.W, model.H, options.eps);
        if (options.stop_rel_improvement > 0.0 && options.check_every > 0 &&
            (sweep + 1) % options.check_every == 0) {
            double err = reconstruction_error(X, model.W, model.H);
            if (last_checked >= 0.0 &&
                last_checked - err <= options.stop_rel_improvement * last_checked) {
                ++sweep;
                break;
            }
            last_checked = err;
        }
    }
    model.iterations_run = sweep;
    model.final_error = reconstruction_error(X, model.W, model.H);
    return model;
}

std::vector<NmfModel> sweep_model_sizes(const SparseCountMatrix& X, int k_min, int k_max,
                                        long iterations, std::uint64_t seed, int jobs,
                                        const NmfOptions& options) {
    if (k_min < 1 || k_min > k_max)
        throw UsageError("cluster range [" + std::to_string(k_min) + ", " +
                         std::to_string(k_max) + "] is not a range of positive integers");
    if (X.nnz() == 0) throw EmptyMatrixError("cannot factorize a matrix with no entries");
    long long max_k = static_cast<long long>(std::min(X.n_rows(), X.n_cols()));
    if (k_max > max_k)
        throw RankTooLargeError("cluster count " + std::to_string(k_max) +
                                " outside [1, " + std::to_string(max_k) + "]");

    const int count = k_max - k_min + 1;
    std::vector<NmfModel> models(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        while (true) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            int k = k_min + i;
            try {
                models[static_cast<std::size_t>(i)] =
                    factorize(X, k, iterations, seed + static_cast<std::uint64_t>(k), options);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) {
                    try {
                        throw;
                    } catch (const Error& e) {
                        first_error = std::make_exception_ptr(
                            Error("model size " + std::to_string(k) + ": " + e.what()));
                    } catch (...) {
                        first_error = std::current_exception();
                    }
                }
            }
        }
    };

    int n_threads = std::clamp(jobs, 1, count);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return models;
}

std::vector<std::pair<std::string, double>> top_loadings(
    const NmfModel& model, int cluster, LoadingAxis axis, std::size_t n,
    const std::vector<std::string>& row_labels, const std::vector<std::string>& col_labels) {
    if (cluster < 0 || cluster >= model.k)
        throw IndexOutOfRangeError("cluster " + std::to_string(cluster) + " outside [0, " +
                                   std::to_string(model.k) + ")");
    std::vector<std::pair<std::string, double>> ranked;
    if (axis == LoadingAxis::Articles) {
        if (static_cast<Eigen::Index>(row_labels.size()) != model.W.rows())
            throw AxisMismatchError("article labels do not match the factor row count");
        ranked.reserve(row_labels.size());
        for (Eigen::Index r = 0; r < model.W.rows(); ++r)
            ranked.emplace_back(row_labels[static_cast<std::size_t>(r)], model.W(r, cluster));
    } else {
        if (static_cast<Eigen::Index>(col_labels.size()) != model.H.cols())
            throw AxisMismatchError("journal labels do not match the factor column count");
        ranked.reserve(col_labels.size());
        for (Eigen::Index c = 0; c < model.H.cols(); ++c)
            ranked.emplace_back(col_labels[static_cast<std::size_t>(c)], model.H(cluster, c));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > n) ranked.resize(n);
    return ranked;
}

void save_model(const NmfModel& model, const std::filesystem::path& dir,
                const std::vector<std::string>& row_labels,
                const std::vector<std::string>& col_labels) {
    if (static_cast<Eigen::Index>(row_labels.size()) != model.W.rows())
        throw AxisMismatchError("article labels do not match the factor row count");
    if (static_cast<Eigen::Index>(col_labels.size()) != model.H.cols())
        throw AxisMismatchError("journal labels do not match the factor column count");
    std::filesystem::create_directories(dir);
    write_matrix_row_major(dir / "W.bin", model.W);
    write_matrix_row_major(dir / "H.bin", model.H);
    nlohmann::json header{{"k", model.k},
                          {"rows", model.W.rows()},
                          {"cols", model.H.cols()},
                          {"seed", model.seed},
                          {"iterations", model.iterations_run},
                          {"final_error", model.final_error}};
    std::ofstream out(dir / "model.json", std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / "model.json").string());
    out << header.dump(2) << '\n';
    if (!out) throw DataError("write failed: " + (dir / "model.json").string());
    write_label_file(dir / "articles.txt", row_labels);
    write_label_file(dir / "journals.txt", col_labels);
}

LoadedModel load_model(const std::filesystem::path& dir) {
    std::ifstream in(dir / "model.json", std::ios::binary);
    if (!in) throw FileNotFoundError((dir / "model.json").string());
    nlohmann::json header;
    try {
        in >> header;
        LoadedModel loaded;
        loaded.model.k = header.at("k").get<int>();
        auto rows = header.at("rows").get<Eigen::Index>();
        auto cols = header.at("cols").get<Eigen::Index>();
        loaded.model.seed = header.at("seed").get<std::uint64_t>();
        loaded.model.iterations_run = header.at("iterations").get<long>();
        loaded.model.final_error = header.at("final_error").get<double>();
        if (loaded.model.k < 1 || rows < 0 || cols < 0)
            throw DataError("bad model header in " + (dir / "model.json").string());
        loaded.model.W = read_matrix_row_major(dir / "W.bin", rows, loaded.model.k);
        loaded.model.H = read_matrix_row_major(dir / "H.bin", loaded.model.k, cols);
        loaded.row_labels = read_label_file(dir / "articles.txt");
        loaded.col_labels = read_label_file(dir / "journals.txt");
        if (static_cast<Eigen::Index>(loaded.row_labels.size()) != rows ||
            static_cast<Eigen::Index>(loaded.col_labels.size()) != cols)
            throw DataError("label files do not match model shape in " + dir.string());
        return loaded;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad model header in " + (dir / "model.json").string() + ": " +
                        e.what());
    }
}

std::vector<LoadedModel> load_models(const std::filesystem::path& models_dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(models_dir, ec) || ec)
        throw FileNotFoundError(models_dir.string());
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(models_dir))
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "model.json"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    std::vector<LoadedModel> models;
    models.reserve(dirs.size());
    for (const auto& dir : dirs) models.push_back(load_model(dir));
    std::sort(models.begin(), models.end(),
              [](const LoadedModel& a, const LoadedModel& b) { return a.model.k < b.model.k; });
    for (std::size_t i = 1; i < models.size(); ++i)
        if (models[i].model.k == models[i - 1].model.k)
            throw DataError("two model directories share k = " +
                            std::to_string(models[i].model.k));
    return models;
}

}  // namespace wikicite
