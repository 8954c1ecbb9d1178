#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "wikicite/count_matrix.hpp"

namespace wikicite {

struct NmfOptions {
    /// Safeguard added to update denominators. 0 restores the textbook
    /// rule (zeros propagate).
    double eps = 1e-12;
    /// Relative-improvement early stop, checked every `check_every`
    /// sweeps; 0 disables it and the full iteration budget runs.
    double stop_rel_improvement = 0.0;
    int check_every = 10;
};

/// Factor pair for one cluster count. W holds article loadings
/// (n_rows x k), H journal loadings (k x n_cols); entries stay
/// nonnegative and finite.
struct NmfModel {
    int k = 0;
    Eigen::MatrixXd W;
    Eigen::MatrixXd H;
    long iterations_run = 0;
    double final_error = 0.0;  // Frobenius norm of X - WH at the stored factors
    std::uint64_t seed = 0;
};

/// Multiplicative update rules for the Euclidean objective:
///   H' = H .* (W'X)  ./ (W'W H  + eps)
///   W' = W .* (X H't) ./ (W H'H't + eps)
/// The H update runs first and the W update uses the fresh H'. Products
/// with X walk its nonzeros in row-major order; the dense reconstruction
/// WH is never materialized.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> multiplicative_step(
    const SparseCountMatrix& X, const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
    double eps = 1e-12);

/// ||X - WH||_F without forming WH, via
/// ||X||_F^2 - 2 <X, WH> + trace((W'W)(HH')), clamped at 0.
double reconstruction_error(const SparseCountMatrix& X, const Eigen::MatrixXd& W,
                            const Eigen::MatrixXd& H);

/// Runs `iterations` full update sweeps from a seeded uniform-(0,1]
/// initialization. Deterministic for fixed (X, k, iterations, seed).
NmfModel factorize(const SparseCountMatrix& X, int k, long iterations, std::uint64_t seed,
                   const NmfOptions& options = {});

/// One independent factorization per k in [k_min, k_max], seeded with
/// seed + k. Runs may execute concurrently (up to `jobs`); results are
/// ordered by k and identical to sequential execution.
std::vector<NmfModel> sweep_model_sizes(const SparseCountMatrix& X, int k_min, int k_max,
                                        long iterations, std::uint64_t seed, int jobs = 1,
                                        const NmfOptions& options = {});

enum class LoadingAxis { Articles, Journals };

/// Top-n labels for one cluster, sorted by loading descending with ties
/// broken by ascending label. Articles rank column `cluster` of W,
/// journals rank row `cluster` of H.
std::vector<std::pair<std::string, double>> top_loadings(
    const NmfModel& model, int cluster, LoadingAxis axis, std::size_t n,
    const std::vector<std::string>& row_labels, const std::vector<std::string>& col_labels);

/// Model directory: W.bin / H.bin (row-major little-endian float64),
/// model.json (k, shape, seed, iterations, final_error) and copies of the
/// label files.
void save_model(const NmfModel& model, const std::filesystem::path& dir,
                const std::vector<std::string>& row_labels,
                const std::vector<std::string>& col_labels);

struct LoadedModel {
    NmfModel model;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

LoadedModel load_model(const std::filesystem::path& dir);

/// Loads every model directory under `models_dir` (any subdirectory with
/// a model.json), ordered by k.
std::vector<LoadedModel> load_models(const std::filesystem::path& models_dir);

}  // namespace wikicite
