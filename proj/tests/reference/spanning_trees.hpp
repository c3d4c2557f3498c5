#pragma once

// Test-only spanning tree oracles: Prim on a dense matrix and exhaustive
// enumeration of labelled trees through Pruefer sequences.

#include <cstddef>
#include <functional>
#include <limits>
#include <set>
#include <utility>
#include <vector>

namespace reference {

using Weights = std::vector<std::vector<double>>;
using EdgeSet = std::set<std::pair<std::size_t, std::size_t>>;

inline EdgeSet prim(const Weights& w) {
    const std::size_t n = w.size();
    std::vector<bool> in(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(n, 0);
    best[0] = 0.0;
    EdgeSet edges;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!in[v] && (u == n || best[v] < best[u])) u = v;
        in[u] = true;
        if (step > 0) edges.insert(std::minmax(u, parent[u]));
        for (std::size_t v = 0; v < n; ++v) {
            if (!in[v] && w[u][v] < best[v]) {
                best[v] = w[u][v];
                parent[v] = u;
            }
        }
    }
    return edges;
}

inline double weight_of(const Weights& w, const EdgeSet& edges) {
    double sum = 0.0;
    for (const auto& [a, b] : edges) sum += w[a][b];
    return sum;
}

/// Calls visit(edges) for each of the n^(n-2) labelled trees on n nodes.
inline void for_each_labelled_tree(std::size_t n, const std::function<void(const EdgeSet&)>& visit) {
    std::vector<std::size_t> seq(n - 2, 0);
    for (;;) {
        std::vector<std::size_t> degree(n, 1);
        for (const auto v : seq) ++degree[v];
        EdgeSet edges;
        for (const auto v : seq) {
            std::size_t leaf = 0;
            while (degree[leaf] != 1) ++leaf;
            edges.insert(std::minmax(leaf, v));
            --degree[leaf];
            --degree[v];
        }
        std::size_t u = n, w = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (degree[v] == 1) (u == n ? u : w) = v;
        }
        edges.insert(std::minmax(u, w));
        visit(edges);

        std::size_t pos = 0;
        while (pos < seq.size() && ++seq[pos] == n) seq[pos++] = 0;
        if (pos == seq.size()) return;
    }
}

}  // namespace reference
