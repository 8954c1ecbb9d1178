#include "wikicite/cluster_bush.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "wikicite/errors.hpp"
#include "wikicite/text_util.hpp"

namespace wikicite {

double cluster_overlap(const NmfModel& a, int i, const NmfModel& b, int j) {
    if (a.W.rows() != b.W.rows())
        throw AxisMismatchError("models do not share an article axis (" +
                                std::to_string(a.W.rows()) + " vs " +
                                std::to_string(b.W.rows()) + " rows)");
    if (i < 0 || i >= a.W.cols())
        throw IndexOutOfRangeError("cluster " + std::to_string(i) + " outside [0, " +
                                   std::to_string(a.W.cols()) + ")");
    if (j < 0 || j >= b.W.cols())
        throw IndexOutOfRangeError("cluster " + std::to_string(j) + " outside [0, " +
                                   std::to_string(b.W.cols()) + ")");
    // one pass, symmetric accumulation: swapping (a,i) and (b,j) swaps the
    // operands of commutative products only, so the result is bit-identical
    double dot_ab = 0.0, dot_aa = 0.0, dot_bb = 0.0;
    for (Eigen::Index r = 0; r < a.W.rows(); ++r) {
        double x = a.W(r, i);
        double y = b.W(r, j);
        dot_ab += x * y;
        dot_aa += x * x;
        dot_bb += y * y;
    }
    if (dot_aa == 0.0 || dot_bb == 0.0) return 0.0;
    if (dot_ab == dot_aa && dot_ab == dot_bb) return 1.0;  // identical columns
    double cos = dot_ab / std::sqrt(dot_aa * dot_bb);
    return std::clamp(cos, 0.0, 1.0);
}

ClusterBush build_bush(const std::vector<NmfModel>& models,
                       const std::vector<std::string>& row_labels,
                       const BushOptions& options) {
    ClusterBush bush;
    if (models.empty()) return bush;

    const auto n_articles = static_cast<Eigen::Index>(row_labels.size());
    for (const NmfModel& m : models)
        if (m.W.rows() != n_articles)
            throw AxisMismatchError("model k=" + std::to_string(m.k) +
                                    " does not match the article labels (" +
                                    std::to_string(m.W.rows()) + " rows, " +
                                    std::to_string(row_labels.size()) + " labels)");
    for (std::size_t i = 1; i < models.size(); ++i)
        if (models[i].k != models[i - 1].k + 1)
            throw NonConsecutiveKError("model sizes " + std::to_string(models[i - 1].k) +
                                       " and " + std::to_string(models[i].k) +
                                       " are not consecutive");

    const int labels_per_node = std::clamp(options.labels_per_node, 1, 3);
    const std::vector<std::string> no_journals;
    std::vector<std::size_t> offsets;
    offsets.reserve(models.size());
    for (const NmfModel& m : models) {
        offsets.push_back(bush.nodes.size());
        for (int c = 0; c < m.k; ++c) {
            BushNode node;
            node.run_k = m.k;
            node.cluster = c;
            auto top = top_loadings(m, c, LoadingAxis::Articles,
                                    static_cast<std::size_t>(labels_per_node), row_labels,
                                    no_journals);
            for (auto& [label, loading] : top) node.labels.push_back(std::move(label));
            node.mass = m.W.col(c).sum();
            bush.nodes.push_back(std::move(node));
        }
    }

    for (std::size_t mi = 0; mi + 1 < models.size(); ++mi) {
        const NmfModel& lo = models[mi];
        const NmfModel& hi = models[mi + 1];
        for (int i = 0; i < lo.k; ++i)
            for (int j = 0; j < hi.k; ++j) {
                double overlap = cluster_overlap(lo, i, hi, j);
                if (overlap >= options.min_overlap)
                    bush.edges.push_back(BushEdge{offsets[mi] + static_cast<std::size_t>(i),
                                                  offsets[mi + 1] + static_cast<std::size_t>(j),
                                                  overlap});
            }
    }
    return bush;
}

namespace {

std::string svg_num(double v) { return format_fixed(v, 2); }

}  // namespace

std::string render_bush_svg(const ClusterBush& bush, const BushStyle& style) {
    // rows bottom-up by increasing k
    std::map<int, std::vector<std::size_t>> runs;
    for (std::size_t n = 0; n < bush.nodes.size(); ++n)
        runs[bush.nodes[n].run_k].push_back(n);

    const double height =
        2.0 * style.margin + (runs.empty() ? 0.0 : style.row_gap * (double)(runs.size() - 1));
    const double usable = style.width - 2.0 * style.margin;

    double min_mass = std::numeric_limits<double>::infinity();
    double max_mass = -std::numeric_limits<double>::infinity();
    for (const BushNode& n : bush.nodes) {
        min_mass = std::min(min_mass, n.mass);
        max_mass = std::max(max_mass, n.mass);
    }
    auto radius = [&](double mass) {
        if (!(max_mass > min_mass)) return 0.5 * (style.min_radius + style.max_radius);
        double t = (std::sqrt(mass) - std::sqrt(min_mass)) /
                   (std::sqrt(max_mass) - std::sqrt(min_mass));
        return style.min_radius + t * (style.max_radius - style.min_radius);
    };
    auto stroke = [&](double overlap) {
        return style.min_stroke + overlap * (style.max_stroke - style.min_stroke);
    };

    std::vector<double> x(bush.nodes.size(), 0.0), y(bush.nodes.size(), 0.0);
    std::size_t row_idx = 0;
    const std::vector<std::size_t>* below = nullptr;
    for (auto& [k, row] : runs) {
        double row_y = height - style.margin - style.row_gap * static_cast<double>(row_idx);
        std::vector<std::size_t> order = row;
        if (below != nullptr) {
            // single barycenter pass against the row underneath
            std::vector<std::pair<double, std::size_t>> keyed;
            keyed.reserve(order.size());
            for (std::size_t n : order) {
                double sum = 0.0;
                int cnt = 0;
                for (const BushEdge& e : bush.edges) {
                    std::size_t other;
                    if (e.b == n) other = e.a;
                    else if (e.a == n) other = e.b;
                    else continue;
                    if (std::find(below->begin(), below->end(), other) != below->end()) {
                        sum += x[other];
                        cnt++;
                    }
                }
                double bary = cnt > 0 ? sum / cnt : std::numeric_limits<double>::infinity();
                keyed.emplace_back(bary, n);
            }
            std::stable_sort(keyed.begin(), keyed.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t i = 0; i < keyed.size(); ++i) order[i] = keyed[i].second;
        }
        double slot = usable / static_cast<double>(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            x[order[i]] = style.margin + slot * (static_cast<double>(i) + 0.5);
            y[order[i]] = row_y;
        }
        below = &runs[k];
        row_idx++;
    }

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           svg_num(style.width) + "\" height=\"" + svg_num(height) + "\" viewBox=\"0 0 " +
           svg_num(style.width) + " " + svg_num(height) + "\">\n";
    svg += "  <rect width=\"" + svg_num(style.width) + "\" height=\"" + svg_num(height) +
           "\" fill=\"#ffffff\"/>\n";

    svg += "  <g stroke=\"#7a9bbf\" stroke-opacity=\"0.75\" fill=\"none\">\n";
    for (const BushEdge& e : bush.edges)
        svg += "    <line x1=\"" + svg_num(x[e.a]) + "\" y1=\"" + svg_num(y[e.a]) +
               "\" x2=\"" + svg_num(x[e.b]) + "\" y2=\"" + svg_num(y[e.b]) +
               "\" stroke-width=\"" + svg_num(stroke(e.overlap)) + "\"/>\n";
    svg += "  </g>\n";

    svg += "  <g fill=\"#e8c36a\" stroke=\"#8a6d1f\" stroke-width=\"1\">\n";
    for (std::size_t n = 0; n < bush.nodes.size(); ++n)
        svg += "    <circle cx=\"" + svg_num(x[n]) + "\" cy=\"" + svg_num(y[n]) + "\" r=\"" +
               svg_num(radius(bush.nodes[n].mass)) + "\"/>\n";
    svg += "  </g>\n";

    svg += "  <g font-family=\"sans-serif\" font-size=\"" + svg_num(style.font_size) +
           "\" fill=\"#222222\">\n";
    row_idx = 0;
    for (auto& [k, row] : runs) {
        double row_y = height - style.margin - style.row_gap * static_cast<double>(row_idx);
        svg += "    <text x=\"" + svg_num(style.margin * 0.25) + "\" y=\"" +
               svg_num(row_y + 0.35 * style.font_size) + "\" fill=\"#777777\">k=" +
               std::to_string(k) + "</text>\n";
        row_idx++;
    }
    for (std::size_t n = 0; n < bush.nodes.size(); ++n) {
        const BushNode& node = bush.nodes[n];
        std::string joined;
        for (std::size_t i = 0; i < node.labels.size(); ++i) {
            if (i > 0) joined += " / ";
            joined += node.labels[i];
        }
        svg += "    <text x=\"" + svg_num(x[n]) + "\" y=\"" +
               svg_num(y[n] - radius(node.mass) - 4.0) +
               "\" text-anchor=\"middle\">" + xml_escape(joined) + "</text>\n";
    }
    svg += "  </g>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace wikicite
