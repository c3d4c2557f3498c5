#pragma once

#include "qmst/tree.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace qmst {

/// Optional per-node rendering metadata.
struct NodeAttributes {
    std::string sector = "none";
    double capitalization = 0.0;
};

using AttributeMap = std::map<std::string, NodeAttributes>;

/// CSV with columns label, sector, capitalization (header required).
[[nodiscard]] AttributeMap read_attributes(const std::string& path);

/// Graphviz: nodes colored by sector, sized by capitalization, edge
/// penwidth proportional to rho.
[[nodiscard]] std::string to_dot(const Tree& tree, const AttributeMap& attributes = {});

/// GraphML with typed node and edge keys (rho, distance, significant, s, q).
[[nodiscard]] std::string to_graphml(const Tree& tree, const AttributeMap& attributes = {});

[[nodiscard]] nlohmann::json metrics_to_json(const TreeMetrics& m, const std::vector<std::string>& labels);

/// Edge list, metrics and provenance as one JSON document.
[[nodiscard]] nlohmann::json tree_report(const Tree& tree, const TreeMetrics& m, const nlohmann::json& provenance);

/// Inverse of tree_report for the node and edge lists.
[[nodiscard]] Tree tree_from_report(const nlohmann::json& report);

}  // namespace qmst
