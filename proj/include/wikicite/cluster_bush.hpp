#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wikicite/nmf.hpp"

namespace wikicite {

struct BushNode {
    int run_k = 0;
    int cluster = 0;
    std::vector<std::string> labels;  // top hub article titles
    double mass = 0.0;                // sum of the cluster's W column
};

struct BushEdge {
    std::size_t a = 0;  // node index in run k
    std::size_t b = 0;  // node index in run k+1
    double overlap = 0.0;
};

/// Layered graph of clusters across NMF runs with consecutive k. Run k
/// contributes k nodes; every edge joins adjacent runs and carries an
/// overlap in [0, 1].
struct ClusterBush {
    std::vector<BushNode> nodes;
    std::vector<BushEdge> edges;
};

/// Cosine similarity between article-loading columns i of `a` and j of
/// `b`; 0 when either column is all zero. Exactly symmetric, and exactly
/// 1 for identical nonzero columns.
double cluster_overlap(const NmfModel& a, int i, const NmfModel& b, int j);

struct BushOptions {
    double min_overlap = 0.1;  // edges below this are dropped
    int labels_per_node = 1;   // up to 3 top hub titles per node
};

/// Builds the bush from models ordered by consecutive k over a shared
/// article axis.
ClusterBush build_bush(const std::vector<NmfModel>& models,
                       const std::vector<std::string>& row_labels,
                       const BushOptions& options = {});

struct BushStyle {
    double width = 960.0;
    double row_gap = 90.0;
    double margin = 60.0;
    double min_radius = 6.0;
    double max_radius = 24.0;
    double min_stroke = 0.75;
    double max_stroke = 8.0;
    double font_size = 11.0;
};

/// Standalone SVG 1.1 document. Rows are stacked bottom-up by increasing
/// k; node radius is affine in sqrt(mass), edge stroke width affine in
/// overlap; clusters within a row are ordered by a single barycenter pass
/// against the row below. Deterministic for identical input.
std::string render_bush_svg(const ClusterBush& bush, const BushStyle& style = {});

}  // namespace wikicite
