#include "qmst/significance.hpp"

#include "qmst/csv.hpp"
#include "qmst/error.hpp"
#include "qmst/ingest.hpp"
#include "qmst/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace qmst {
namespace {

std::size_t index_of(const SymmetricMatrix& m, const std::string& label) {
    const auto& labels = m.labels();
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw ValidationError("label '" + label + "' not present in rho matrix");
    return static_cast<std::size_t>(it - labels.begin());
}

double edge_rho(const Tree& tree, const TreeEdge& e, const SymmetricMatrix& rho) {
    return rho(index_of(rho, tree.labels[e.a]), index_of(rho, tree.labels[e.b]));
}

}  // namespace

ThresholdTable::ThresholdTable(std::vector<ThresholdEntry> entries) : entries_(std::move(entries)) {}

std::optional<ThresholdEntry> ThresholdTable::find(std::size_t scale, double q) const {
    for (const auto& e : entries_)
        if (e.scale == scale && e.q == q) return e;
    return std::nullopt;
}

const ThresholdEntry& ThresholdTable::at(std::size_t scale, double q) const {
    for (const auto& e : entries_)
        if (e.scale == scale && e.q == q) return e;
    throw ValidationError("no threshold for s=" + std::to_string(scale) + ", q=" + csv::format_sig(q, 6));
}

MaximaSummary summarize_maxima(std::span<const double> maxima) {
    if (maxima.size() < 2) throw ValidationError("at least two surrogate sets are required");
    MaximaSummary out;
    for (const double v : maxima) out.mean += v;
    out.mean /= static_cast<double>(maxima.size());
    double ss = 0.0;
    for (const double v : maxima) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(maxima.size() - 1));
    out.tau = out.mean + 2.0 * out.sd;
    return out;
}

double max_off_diagonal(const SymmetricMatrix& m) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j) best = std::max(best, m(i, j));
    return best;
}

ThresholdTable surrogate_thresholds(const SeriesPanel& panel, std::span<const std::size_t> scales,
                                    std::span<const double> q_values, std::size_t n_sets, std::uint64_t seed,
                                    const RhoOptions& options) {
    if (n_sets < 2) throw ValidationError("at least two surrogate sets are required");
    if (scales.empty() || q_values.empty()) throw ValidationError("empty (s, q) grid");
    // maxima[(scale index, q index)][set]
    std::vector<std::vector<double>> maxima(scales.size() * q_values.size(), std::vector<double>(n_sets));
    for (std::size_t k = 0; k < n_sets; ++k) {
        const auto surrogate = shuffle(panel, derive_seed(seed, k));
        for (std::size_t si = 0; si < scales.size(); ++si) {
            const auto mats = rho_matrices(surrogate, scales[si], q_values, options);
            for (std::size_t qi = 0; qi < q_values.size(); ++qi) {
                maxima[si * q_values.size() + qi][k] = max_off_diagonal(mats[qi]);
            }
        }
    }
    std::vector<ThresholdEntry> entries;
    for (std::size_t si = 0; si < scales.size(); ++si) {
        for (std::size_t qi = 0; qi < q_values.size(); ++qi) {
            const auto sum = summarize_maxima(maxima[si * q_values.size() + qi]);
            entries.push_back({scales[si], q_values[qi], sum.tau, sum.mean, sum.sd, n_sets, seed});
        }
    }
    return ThresholdTable(std::move(entries));
}

Tree mark_significance(const Tree& tree, const SymmetricMatrix& rho, double tau) {
    Tree out = tree;
    for (auto& e : out.edges) e.significant = edge_rho(tree, e, rho) >= tau;
    return out;
}

FilteredTree filter_tree(const Tree& tree, const SymmetricMatrix& rho, double tau) {
    std::vector<TreeEdge> kept;
    for (const auto& e : tree.edges) {
        if (edge_rho(tree, e, rho) >= tau) {
            kept.push_back(e);
            kept.back().significant = true;
        }
    }
    std::vector<std::size_t> degree(tree.labels.size(), 0);
    for (const auto& e : kept) {
        ++degree[e.a];
        ++degree[e.b];
    }
    FilteredTree out;
    out.tree.scale = tree.scale;
    out.tree.q = tree.q;
    std::vector<std::size_t> remap(tree.labels.size(), 0);
    for (std::size_t v = 0; v < tree.labels.size(); ++v) {
        if (degree[v] == 0) {
            ++out.removed_nodes;
            continue;
        }
        remap[v] = out.tree.labels.size();
        out.tree.labels.push_back(tree.labels[v]);
    }
    for (auto e : kept) {
        e.a = remap[e.a];
        e.b = remap[e.b];
        out.tree.edges.push_back(e);
    }
    out.removed_edges = tree.edges.size() - kept.size();
    for (const auto& comp : components(out.tree)) {
        std::vector<std::string> names;
        for (const auto v : comp) names.push_back(out.tree.labels[v]);
        out.components.push_back(std::move(names));
    }
    return out;
}

std::string thresholds_to_csv(const ThresholdTable& table) {
    std::string out = "s,q,tau,mean_max,sd_max,n_sets,seed\n";
    for (const auto& e : table.entries()) {
        out += csv::join({std::to_string(e.scale), csv::format_exact(e.q), csv::format_exact(e.tau),
                          csv::format_exact(e.mean_max), csv::format_exact(e.sd_max), std::to_string(e.n_sets),
                          std::to_string(e.seed)});
        out += '\n';
    }
    return out;
}

void write_thresholds_csv(const std::string& path, const ThresholdTable& table) {
    write_text(path, thresholds_to_csv(table));
}

ThresholdTable read_thresholds_csv(const std::string& path) {
    const auto table = csv::read(path);
    const std::vector<std::string> expected = {"s", "q", "tau", "mean_max", "sd_max", "n_sets", "seed"};
    if (table.header != expected) throw IoError(path + ": unexpected threshold table header");
    std::vector<ThresholdEntry> entries;
    for (const auto& r : table.rows) {
        ThresholdEntry e;
        e.scale = static_cast<std::size_t>(csv::to_integer(r[0], path));
        e.q = csv::to_double(r[1], path);
        e.tau = csv::to_double(r[2], path);
        e.mean_max = csv::to_double(r[3], path);
        e.sd_max = csv::to_double(r[4], path);
        e.n_sets = static_cast<std::size_t>(csv::to_integer(r[5], path));
        e.seed = std::stoull(r[6]);
        entries.push_back(e);
    }
    return ThresholdTable(std::move(entries));
}

}  // namespace qmst
