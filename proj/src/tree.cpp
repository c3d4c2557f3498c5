#include "qmst/tree.hpp"

#include "qmst/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

namespace qmst {
namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

Tree kruskal_impl(const DistanceMatrix& d, const SymmetricMatrix* rho) {
    const std::size_t n = d.size();
    if (n < 2) throw ValidationError("a spanning tree needs at least two nodes");
    if (rho && rho->labels() != d.labels()) throw ValidationError("distance and rho matrices have different labels");
    const auto& labels = d.labels();

    struct Candidate {
        double distance;
        const std::string* lo;
        const std::string* hi;
        std::size_t a, b;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = d(i, j);
            if (!std::isfinite(w)) {
                throw ComputationError("non-finite distance between '" + labels[i] + "' and '" + labels[j] + "'");
            }
            const bool swap = labels[j] < labels[i];
            candidates.push_back({w, swap ? &labels[j] : &labels[i], swap ? &labels[i] : &labels[j], i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        return std::tie(x.distance, *x.lo, *x.hi) < std::tie(y.distance, *y.lo, *y.hi);
    });

    Tree tree;
    tree.labels = labels;
    tree.scale = d.scale;
    tree.q = d.q;
    DisjointSets sets(n);
    for (const auto& c : candidates) {
        if (!sets.unite(c.a, c.b)) continue;
        const double r = rho ? (*rho)(c.a, c.b) : 1.0 - 0.5 * c.distance * c.distance;
        tree.edges.push_back({c.a, c.b, c.distance, r, true});
        if (tree.edges.size() == n - 1) break;
    }
    return tree;
}

std::vector<std::vector<std::size_t>> adjacency(const Tree& tree) {
    std::vector<std::vector<std::size_t>> adj(tree.labels.size());
    for (const auto& e : tree.edges) {
        adj.at(e.a).push_back(e.b);
        adj.at(e.b).push_back(e.a);
    }
    return adj;
}

}  // namespace

double Tree::total_distance() const {
    double sum = 0.0;
    for (const auto& e : edges) sum += e.distance;
    return sum;
}

std::vector<std::pair<std::string, std::string>> Tree::label_pairs() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(edges.size());
    for (const auto& e : edges) out.emplace_back(std::minmax(labels[e.a], labels[e.b]));
    return out;
}

Tree kruskal(const DistanceMatrix& d) { return kruskal_impl(d, nullptr); }

Tree kruskal(const DistanceMatrix& d, const SymmetricMatrix& rho) { return kruskal_impl(d, &rho); }

std::vector<std::vector<std::size_t>> components(const Tree& tree) {
    const auto adj = adjacency(tree);
    const std::size_t n = adj.size();
    std::vector<bool> seen(n, false);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        std::vector<std::size_t> comp;
        std::vector<std::size_t> stack{start};
        seen[start] = true;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (const auto w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return out;
}

TreeMetrics metrics(const Tree& tree) {
    TreeMetrics m;
    const auto adj = adjacency(tree);
    const std::size_t n = adj.size();
    m.degree.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        m.degree[v] = adj[v].size();
        if (v == 0 || m.degree[v] > m.max_degree) {
            m.max_degree = m.degree[v];
            m.max_degree_node = tree.labels[v];
        }
    }
    m.total_distance = tree.total_distance();

    const auto comps = components(tree);
    for (const auto& c : comps) m.component_sizes.push_back(c.size());
    if (comps.empty()) return m;

    const auto& main = comps.front();
    m.largest_component = main.size();
    if (main.size() < 2) return m;

    // Integer hop sum; a single final division keeps closed forms exact.
    unsigned long long hops = 0;
    std::vector<std::size_t> dist(n);
    std::vector<bool> visited(n);
    for (const auto src : main) {
        std::fill(visited.begin(), visited.end(), false);
        std::queue<std::size_t> frontier;
        frontier.push(src);
        visited[src] = true;
        dist[src] = 0;
        while (!frontier.empty()) {
            const auto v = frontier.front();
            frontier.pop();
            if (v > src) hops += dist[v];
            for (const auto w : adj[v]) {
                if (!visited[w]) {
                    visited[w] = true;
                    dist[w] = dist[v] + 1;
                    frontier.push(w);
                }
            }
        }
    }
    const unsigned long long pairs = static_cast<unsigned long long>(main.size()) * (main.size() - 1) / 2;
    m.average_path_length = static_cast<double>(hops) / static_cast<double>(pairs);
    return m;
}

TreeComparison compare(const Tree& a, const Tree& b) {
    const auto pa = a.label_pairs();
    const auto pb = b.label_pairs();
    const std::set<std::pair<std::string, std::string>> sa(pa.begin(), pa.end());
    const std::set<std::pair<std::string, std::string>> sb(pb.begin(), pb.end());
    TreeComparison c;
    for (const auto& e : sa) c.common_edges += sb.count(e);
    const std::size_t uni = sa.size() + sb.size() - c.common_edges;
    c.jaccard = uni == 0 ? 1.0 : static_cast<double>(c.common_edges) / static_cast<double>(uni);
    return c;
}

}  // namespace qmst
