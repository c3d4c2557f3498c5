#include "qmst/graph_io.hpp"

#include "qmst/csv.hpp"
#include "qmst/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace qmst {
namespace {

constexpr std::array<const char*, 12> kPalette = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#ffff33",
                                                  "#a65628", "#f781bf", "#66c2a5", "#8da0cb", "#e78ac3", "#a6d854"};
constexpr const char* kNeutral = "#bbbbbb";
constexpr double kPenPerRho = 6.0;

std::string xml_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

const NodeAttributes& attributes_of(const AttributeMap& attributes, const std::string& label) {
    static const NodeAttributes neutral;
    const auto it = attributes.find(label);
    return it == attributes.end() ? neutral : it->second;
}

}  // namespace

AttributeMap read_attributes(const std::string& path) {
    const auto table = csv::read(path);
    const auto col = [&](const std::string& name) {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) throw IoError(path + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - table.header.begin());
    };
    const auto label = col("label"), sector = col("sector"), cap = col("capitalization");
    AttributeMap out;
    for (const auto& row : table.rows) out[row[label]] = {row[sector], csv::to_double(row[cap], path)};
    return out;
}

std::string to_dot(const Tree& tree, const AttributeMap& attributes) {
    std::set<std::string> sectors;
    double max_cap = 0.0;
    for (const auto& l : tree.labels) {
        const auto& a = attributes_of(attributes, l);
        if (a.sector != "none") sectors.insert(a.sector);
        max_cap = std::max(max_cap, a.capitalization);
    }
    const std::vector<std::string> sector_list(sectors.begin(), sectors.end());

    std::string out = "graph qmst {\n";
    out += "  graph [overlap=false, splines=true";
    if (tree.scale) out += ", label=\"s=" + std::to_string(*tree.scale);
    if (tree.q) out += (tree.scale ? " " : ", label=\"") + std::string("q=") + csv::format_sig(*tree.q, 6);
    if (tree.scale || tree.q) out += "\"";
    out += "];\n  node [shape=circle, style=filled, fontsize=10];\n";
    for (const auto& l : tree.labels) {
        const auto& a = attributes_of(attributes, l);
        const auto it = std::find(sector_list.begin(), sector_list.end(), a.sector);
        const char* color =
            it == sector_list.end() ? kNeutral : kPalette[static_cast<std::size_t>(it - sector_list.begin()) % kPalette.size()];
        const double width = max_cap > 0.0 ? 0.3 + 1.2 * std::sqrt(a.capitalization / max_cap) : 0.5;
        out += "  " + dot_quote(l) + " [fillcolor=\"" + color + "\", width=" + csv::format_sig(width, 4) +
               ", tooltip=" + dot_quote(a.sector) + "];\n";
    }
    for (const auto& e : tree.edges) {
        const double pen = kPenPerRho * std::max(e.rho, 0.0);
        out += "  " + dot_quote(tree.labels[e.a]) + " -- " + dot_quote(tree.labels[e.b]) +
               " [penwidth=" + csv::format_sig(std::max(pen, 0.05), 4) + ", rho=" + csv::format_sig(e.rho, 6) +
               (e.significant ? "" : ", style=dashed") + "];\n";
    }
    out += "}\n";
    return out;
}

std::string to_graphml(const Tree& tree, const AttributeMap& attributes) {
    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" "
        "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
        "xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
        "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n"
        "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        "  <key id=\"sector\" for=\"node\" attr.name=\"sector\" attr.type=\"string\"/>\n"
        "  <key id=\"capitalization\" for=\"node\" attr.name=\"capitalization\" attr.type=\"double\"/>\n"
        "  <key id=\"rho\" for=\"edge\" attr.name=\"rho\" attr.type=\"double\"/>\n"
        "  <key id=\"distance\" for=\"edge\" attr.name=\"distance\" attr.type=\"double\"/>\n"
        "  <key id=\"significant\" for=\"edge\" attr.name=\"significant\" attr.type=\"boolean\"/>\n"
        "  <key id=\"s\" for=\"graph\" attr.name=\"s\" attr.type=\"long\"/>\n"
        "  <key id=\"q\" for=\"graph\" attr.name=\"q\" attr.type=\"double\"/>\n"
        "  <graph id=\"qmst\" edgedefault=\"undirected\">\n";
    if (tree.scale) out += "    <data key=\"s\">" + std::to_string(*tree.scale) + "</data>\n";
    if (tree.q) out += "    <data key=\"q\">" + csv::format_exact(*tree.q) + "</data>\n";
    for (std::size_t i = 0; i < tree.labels.size(); ++i) {
        const auto& a = attributes_of(attributes, tree.labels[i]);
        out += "    <node id=\"n" + std::to_string(i) + "\">\n";
        out += "      <data key=\"label\">" + xml_escape(tree.labels[i]) + "</data>\n";
        out += "      <data key=\"sector\">" + xml_escape(a.sector) + "</data>\n";
        out += "      <data key=\"capitalization\">" + csv::format_exact(a.capitalization) + "</data>\n";
        out += "    </node>\n";
    }
    for (std::size_t k = 0; k < tree.edges.size(); ++k) {
        const auto& e = tree.edges[k];
        out += "    <edge id=\"e" + std::to_string(k) + "\" source=\"n" + std::to_string(e.a) + "\" target=\"n" +
               std::to_string(e.b) + "\">\n";
        out += "      <data key=\"rho\">" + csv::format_exact(e.rho) + "</data>\n";
        out += "      <data key=\"distance\">" + csv::format_exact(e.distance) + "</data>\n";
        out += std::string("      <data key=\"significant\">") + (e.significant ? "true" : "false") + "</data>\n";
        out += "    </edge>\n";
    }
    out += "  </graph>\n</graphml>\n";
    return out;
}

nlohmann::json metrics_to_json(const TreeMetrics& m, const std::vector<std::string>& labels) {
    nlohmann::json degrees = nlohmann::json::object();
    for (std::size_t i = 0; i < m.degree.size(); ++i) degrees[labels[i]] = m.degree[i];
    return {
        {"degree", degrees},
        {"average_path_length", m.average_path_length},
        {"path_length_convention", "unweighted hops, all node pairs of the largest component"},
        {"largest_component", m.largest_component},
        {"component_sizes", m.component_sizes},
        {"total_distance", m.total_distance},
        {"max_degree", m.max_degree},
        {"max_degree_node", m.max_degree_node},
    };
}

nlohmann::json tree_report(const Tree& tree, const TreeMetrics& m, const nlohmann::json& provenance) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : tree.edges) {
        edges.push_back({{"a", tree.labels[e.a]},
                         {"b", tree.labels[e.b]},
                         {"distance", e.distance},
                         {"rho", e.rho},
                         {"significant", e.significant}});
    }
    nlohmann::json report = {
        {"nodes", tree.labels},
        {"edges", edges},
        {"metrics", metrics_to_json(m, tree.labels)},
        {"provenance", provenance},
    };
    if (tree.scale) report["s"] = *tree.scale;
    if (tree.q) report["q"] = *tree.q;
    return report;
}

Tree tree_from_report(const nlohmann::json& report) {
    Tree tree;
    try {
        tree.labels = report.at("nodes").get<std::vector<std::string>>();
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < tree.labels.size(); ++i) index[tree.labels[i]] = i;
        for (const auto& e : report.at("edges")) {
            tree.edges.push_back({index.at(e.at("a").get<std::string>()), index.at(e.at("b").get<std::string>()),
                                  e.at("distance").get<double>(), e.at("rho").get<double>(),
                                  e.at("significant").get<bool>()});
        }
        if (report.contains("s")) tree.scale = report["s"].get<std::size_t>();
        if (report.contains("q")) tree.q = report["q"].get<double>();
    } catch (const std::exception& e) {
        throw IoError(std::string("malformed tree report: ") + e.what());
    }
    return tree;
}

}  // namespace qmst
