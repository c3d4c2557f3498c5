#include "qmst/pipeline.hpp"

#include "qmst/csv.hpp"
#include "qmst/digest.hpp"
#include "qmst/error.hpp"
#include "qmst/fluct.hpp"
#include "qmst/graph_io.hpp"
#include "qmst/ingest.hpp"
#include "qmst/rho.hpp"
#include "qmst/rng.hpp"
#include "qmst/significance.hpp"
#include "qmst/similarity.hpp"
#include "qmst/tree.hpp"

#include <filesystem>
#include <map>
#include <optional>

namespace qmst {
namespace {

// Seed streams of the master seed.
constexpr std::uint64_t kThresholdStream = 1;
constexpr std::uint64_t kTransformStreamBase = 1000;

class ArtifactWriter {
public:
    explicit ArtifactWriter(std::string root) : root_(std::move(root)) {}

    void write(const std::string& relative, const std::string& content) {
        write_text((std::filesystem::path(root_) / relative).string(), content);
        artifacts_.push_back({{"path", relative}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }
    [[nodiscard]] const nlohmann::json& artifacts() const noexcept { return artifacts_; }
    [[nodiscard]] const std::string& root() const noexcept { return root_; }

private:
    std::string root_;
    nlohmann::json artifacts_ = nlohmann::json::array();
};

std::string cell_name(std::size_t s, double q) { return "s" + std::to_string(s) + "_q" + csv::format_exact(q); }

nlohmann::json threshold_json(const ThresholdEntry& e) {
    return {{"tau", e.tau}, {"mean_max", e.mean_max}, {"sd_max", e.sd_max}, {"n_sets", e.n_sets}, {"seed", e.seed}};
}

}  // namespace

SeriesPanel load_panel(const RunConfig& config) {
    std::optional<SeriesPanel> panel;
    if (config.input_kind == "prices") {
        panel.emplace(log_returns(read_price_panel(config.input), ReturnOptions{config.dt, config.drop_gaps}));
    } else {
        panel.emplace(aggregate_returns(read_series_panel(config.input), config.dt));
    }
    for (std::size_t k = 0; k < config.transforms.size(); ++k) {
        const auto spec = TransformSpec::parse(config.transforms[k], derive_seed(config.seed, kTransformStreamBase + k));
        panel.emplace(apply_transform(*panel, spec));
    }
    return std::move(*panel);
}

PipelineResult run_pipeline(const RunConfig& config) {
    config.validate();
    const auto panel = load_panel(config);
    if (panel.size() < 2) throw ValidationError("pipeline needs at least two series");

    DetrendConfig detrend{config.order, config.scales, config.q_values};
    const auto warnings = detrend.validate(panel.length());
    for (const auto s : config.scales) panel.require_scale(s);

    AttributeMap attributes;
    if (!config.attributes.empty()) attributes = read_attributes(config.attributes);

    const std::string config_hash = config.hash();
    const std::uint64_t threshold_seed = derive_seed(config.seed, kThresholdStream);
    RhoOptions options;
    options.order = config.order;
    options.threads = config.threads;
    options.use_cache = config.use_cache;

    ArtifactWriter out(config.output_dir);
    out.write("config.txt", config.canonical());

    nlohmann::json manifest;
    manifest["config"] = config.to_json();
    manifest["config_hash"] = config_hash;
    manifest["warnings"] = warnings;
    manifest["panel"] = {{"series", panel.size()},
                         {"length", panel.length()},
                         {"labels", panel.labels()},
                         {"provenance", panel.meta().describe()}};
    manifest["conventions"] = {
        {"path_length", "unweighted hops, all node pairs of the largest component"},
        {"threshold", "tau = mean + 2 * sample sd of per-surrogate-set maximum rho"},
        {"significant_edge", "rho >= tau"},
        {"returns", "non-overlapping log-returns at stride dt"},
    };

    // Thresholds first: small, and every cell of a scale needs them.
    std::map<std::size_t, std::optional<ThresholdTable>> thresholds;
    std::map<std::size_t, std::string> threshold_errors;
    std::vector<ThresholdEntry> all_entries;
    if (config.n_sets >= 2) {
        for (const auto s : config.scales) {
            const std::size_t one[] = {s};
            try {
                thresholds[s] = surrogate_thresholds(panel, one, config.q_values, config.n_sets, threshold_seed, options);
                for (const auto& e : thresholds[s]->entries()) all_entries.push_back(e);
            } catch (const ComputationError& e) {
                threshold_errors[s] = e.what();
            }
        }
        out.write("thresholds.csv", thresholds_to_csv(ThresholdTable(all_entries)));
    }

    PipelineResult result;
    nlohmann::json cells = nlohmann::json::array();
    nlohmann::json common = nlohmann::json::array();
    for (const auto s : config.scales) {
        std::vector<RhoMatrix> rhos;
        std::string scale_error;
        if (threshold_errors.count(s)) {
            scale_error = "threshold estimation failed: " + threshold_errors[s];
        } else {
            try {
                rhos = rho_matrices(panel, s, config.q_values, options);
            } catch (const ComputationError& e) {
                scale_error = e.what();
            }
        }

        std::vector<std::pair<double, Tree>> filtered_by_q;
        for (std::size_t qi = 0; qi < config.q_values.size(); ++qi) {
            const double q = config.q_values[qi];
            const std::string name = cell_name(s, q);
            nlohmann::json cell = {{"s", s}, {"q", q}, {"name", name}};
            if (!scale_error.empty()) {
                cell["status"] = "error";
                cell["error"] = scale_error;
                cells.push_back(cell);
                ++result.cells_failed;
                continue;
            }
            try {
                const auto& rho = rhos[qi];
                const auto dist = to_distance(rho);
                auto tree = kruskal(dist, rho);
                std::optional<ThresholdEntry> threshold;
                if (thresholds.count(s) && thresholds[s]) threshold = thresholds[s]->at(s, q);
                if (threshold) tree = mark_significance(tree, rho, threshold->tau);
                const double tau = threshold ? threshold->tau : -1.0;
                const auto filtered = filter_tree(tree, rho, tau);

                const auto tree_metrics = metrics(tree);
                const auto filtered_metrics = metrics(filtered.tree);
                nlohmann::json provenance = {{"config_hash", config_hash},
                                             {"seed", config.seed},
                                             {"threshold_seed", threshold ? nlohmann::json(threshold_seed) : nlohmann::json()},
                                             {"panel", panel.meta().describe()},
                                             {"s", s},
                                             {"q", q},
                                             {"m", config.order}};

                const std::string dir = "cells/" + name + "/";
                if (config.wants("csv")) {
                    out.write(dir + "rho.csv", matrix_to_csv(rho, "rho"));
                    out.write(dir + "distance.csv", matrix_to_csv(dist, "distance"));
                }
                if (config.wants("json")) {
                    out.write(dir + "tree.json", tree_report(tree, tree_metrics, provenance).dump(2) + "\n");
                    auto fjson = tree_report(filtered.tree, filtered_metrics, provenance);
                    fjson["tau"] = tau;
                    fjson["components"] = filtered.components;
                    fjson["removed_nodes"] = filtered.removed_nodes;
                    out.write(dir + "filtered.json", fjson.dump(2) + "\n");
                }
                if (config.wants("dot")) {
                    out.write(dir + "tree.dot", to_dot(tree, attributes));
                    out.write(dir + "filtered.dot", to_dot(filtered.tree, attributes));
                }
                if (config.wants("graphml")) {
                    out.write(dir + "tree.graphml", to_graphml(tree, attributes));
                    out.write(dir + "filtered.graphml", to_graphml(filtered.tree, attributes));
                }

                cell["status"] = "ok";
                cell["threshold"] = threshold ? threshold_json(*threshold) : nlohmann::json();
                cell["tree"] = {{"edges", tree.edges.size()},
                                {"total_distance", tree_metrics.total_distance},
                                {"average_path_length", tree_metrics.average_path_length},
                                {"max_degree", tree_metrics.max_degree},
                                {"max_degree_node", tree_metrics.max_degree_node}};
                cell["filtered"] = {{"nodes", filtered.tree.labels.size()},
                                    {"edges", filtered.tree.edges.size()},
                                    {"removed_nodes", filtered.removed_nodes},
                                    {"component_sizes", filtered_metrics.component_sizes},
                                    {"average_path_length", filtered_metrics.average_path_length},
                                    {"max_degree", filtered_metrics.max_degree},
                                    {"max_degree_node", filtered_metrics.max_degree_node}};
                filtered_by_q.emplace_back(q, filtered.tree);
                ++result.cells_ok;
            } catch (const ComputationError& e) {
                cell["status"] = "error";
                cell["error"] = e.what();
                ++result.cells_failed;
            }
            cells.push_back(cell);
        }

        for (std::size_t a = 0; a < filtered_by_q.size(); ++a) {
            for (std::size_t b = a + 1; b < filtered_by_q.size(); ++b) {
                const auto c = compare(filtered_by_q[a].second, filtered_by_q[b].second);
                common.push_back({{"s", s},
                                  {"q_a", filtered_by_q[a].first},
                                  {"q_b", filtered_by_q[b].first},
                                  {"common_edges", c.common_edges},
                                  {"jaccard", c.jaccard}});
            }
        }
    }
    manifest["cells"] = cells;
    manifest["common_edges_filtered"] = common;

    if (!config.pearson_dts.empty()) {
        try {
            const auto report = similarity_grid(panel, config.pearson_dts, config.scales, config.q_values, options);
            out.write("similarity.csv", similarity_to_csv(report));
            manifest["similarity"] = {{"status", "ok"}, {"vector_length", report.vector_length}};
        } catch (const ComputationError& e) {
            manifest["similarity"] = {{"status", "error"}, {"error", e.what()}};
        }
    }

    manifest["artifacts"] = out.artifacts();
    const std::string text = manifest.dump(2) + "\n";
    result.manifest_path = (std::filesystem::path(config.output_dir) / "manifest.json").string();
    write_text(result.manifest_path, text);
    result.manifest_hash = sha256_hex(text);
    return result;
}

}  // namespace qmst
