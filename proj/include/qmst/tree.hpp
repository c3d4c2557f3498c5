#pragma once

#include "qmst/rho.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qmst {

struct TreeEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    double distance = 0.0;
    double rho = 0.0;
    bool significant = true;
};

/// Spanning tree (N - 1 edges) or, after significance filtering, a forest.
/// Edge endpoints index into `labels`.
struct Tree {
    std::vector<std::string> labels;
    std::vector<TreeEdge> edges;
    std::optional<std::size_t> scale;
    std::optional<double> q;

    [[nodiscard]] double total_distance() const;
    /// Unordered label pairs, each as (min, max).
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> label_pairs() const;
};

/// Kruskal with union-find. Ties on distance are broken by the
/// lexicographic (min label, max label) pair. Edge rho is recovered as
/// 1 - d^2 / 2.
[[nodiscard]] Tree kruskal(const DistanceMatrix& d);
/// Same, but edge rho values are taken from `rho`.
[[nodiscard]] Tree kruskal(const DistanceMatrix& d, const SymmetricMatrix& rho);

struct TreeMetrics {
    std::vector<std::size_t> degree;
    /// Mean hop count over unordered node pairs of the largest component.
    double average_path_length = 0.0;
    std::size_t largest_component = 0;
    /// Sizes in descending order.
    std::vector<std::size_t> component_sizes;
    double total_distance = 0.0;
    std::size_t max_degree = 0;
    std::string max_degree_node;
};

[[nodiscard]] TreeMetrics metrics(const Tree& tree);

/// Connected components as lists of node indices, each sorted, ordered by
/// descending size then smallest index.
[[nodiscard]] std::vector<std::vector<std::size_t>> components(const Tree& tree);

struct TreeComparison {
    std::size_t common_edges = 0;
    double jaccard = 0.0;
};

[[nodiscard]] TreeComparison compare(const Tree& a, const Tree& b);

}  // namespace qmst
