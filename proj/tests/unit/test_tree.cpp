#include "qmst/error.hpp"
#include "qmst/graph_io.hpp"
#include "qmst/rng.hpp"
#include "qmst/tree.hpp"
#include "reference/spanning_trees.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace qmst;

namespace {

std::vector<std::string> names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("N" + std::to_string(100 + i));
    return out;
}

DistanceMatrix from_weights(const reference::Weights& w) {
    DistanceMatrix d;
    static_cast<SymmetricMatrix&>(d) = SymmetricMatrix(names(w.size()), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j) d.set(i, j, w[i][j]);
    return d;
}

reference::Weights random_weights(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    reference::Weights w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) w[i][j] = w[j][i] = u(rng.engine());
    return w;
}

reference::EdgeSet edge_set(const Tree& t) {
    reference::EdgeSet out;
    for (const auto& e : t.edges) out.insert(std::minmax(e.a, e.b));
    return out;
}

Tree star(std::size_t n) {
    Tree t{names(n), {}, {}, {}};
    for (std::size_t i = 1; i < n; ++i) t.edges.push_back({0, i, 1.0, 0.5, true});
    return t;
}

Tree path(std::size_t n) {
    Tree t{names(n), {}, {}, {}};
    for (std::size_t i = 1; i < n; ++i) t.edges.push_back({i - 1, i, 1.0, 0.5, true});
    return t;
}

}  // namespace

TEST_CASE("kruskal on a forced tree") {
    const auto d = from_weights({{0, 1, 3}, {1, 0, 2}, {3, 2, 0}});
    const auto t = kruskal(d);
    CHECK(edge_set(t) == reference::EdgeSet{{0, 1}, {1, 2}});
    CHECK(t.total_distance() == 3.0);
    CHECK(t.edges.front().rho == doctest::Approx(0.5));  // 1 - 1/2
}

TEST_CASE("kruskal agrees with Prim and with exhaustive enumeration") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto w = random_weights(7, seed);
        const auto t = kruskal(from_weights(w));
        REQUIRE(t.edges.size() == 6);
        double best = std::numeric_limits<double>::infinity();
        std::size_t count = 0;
        reference::for_each_labelled_tree(7, [&](const reference::EdgeSet& e) {
            best = std::min(best, reference::weight_of(w, e));
            ++count;
        });
        CHECK(count == 16807);
        CHECK(t.total_distance() == doctest::Approx(best).epsilon(1e-12));
        CHECK(edge_set(t) == reference::prim(w));
    }
    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        const auto w = random_weights(40, seed);
        CHECK(edge_set(kruskal(from_weights(w))) == reference::prim(w));
    }
}

TEST_CASE("cut property holds for every tree edge") {
    const auto w = random_weights(25, 99);
    const auto t = kruskal(from_weights(w));
    for (std::size_t skip = 0; skip < t.edges.size(); ++skip) {
        Tree cut = t;
        cut.edges.erase(cut.edges.begin() + static_cast<std::ptrdiff_t>(skip));
        const auto comps = components(cut);
        REQUIRE(comps.size() == 2);
        std::vector<int> side(25, 1);
        for (const auto v : comps[0]) side[v] = 0;
        double lightest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < 25; ++i)
            for (std::size_t j = 0; j < 25; ++j)
                if (side[i] != side[j]) lightest = std::min(lightest, w[i][j]);
        CHECK(t.edges[skip].distance == lightest);
    }
}

TEST_CASE("ties are broken by label pair") {
    const auto d = from_weights({{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}});
    CHECK(edge_set(kruskal(d)) == reference::EdgeSet{{0, 1}, {0, 2}, {0, 3}});
}

TEST_CASE("kruskal depends only on the order of distances") {
    const auto w = random_weights(15, 5);
    auto warped = w;
    for (auto& row : warped)
        for (auto& v : row) v = std::exp(3.0 * v) - 1.0;
    CHECK(edge_set(kruskal(from_weights(w))) == edge_set(kruskal(from_weights(warped))));
}

TEST_CASE("kruskal rejects non-finite distances") {
    auto w = random_weights(4, 1);
    w[1][2] = w[2][1] = std::nan("");
    CHECK_THROWS_AS((void)kruskal(from_weights(w)), ComputationError);
}

TEST_CASE("metrics closed forms") {
    for (const std::size_t n : {5u, 100u}) {
        const auto m = metrics(star(n));
        CHECK(m.max_degree == n - 1);
        CHECK(m.max_degree_node == "N100");
        CHECK(m.average_path_length == 2.0 * (n - 1) / n);
    }
    for (const std::size_t n : {4u, 10u}) {
        const auto m = metrics(path(n));
        CHECK(m.average_path_length == doctest::Approx((n + 1) / 3.0).epsilon(1e-15));
        CHECK(m.max_degree == 2);
        CHECK(m.max_degree_node == "N101");
    }
    const auto m = metrics(path(10));
    std::size_t sum = 0;
    for (const auto k : m.degree) sum += k;
    CHECK(sum == 18);
    CHECK(m.component_sizes == std::vector<std::size_t>{10});
    CHECK(m.total_distance == 9.0);
}

TEST_CASE("metrics on a forest use the largest component") {
    Tree t{names(7), {{0, 1, 1, 0.5, true}, {1, 2, 1, 0.5, true}, {4, 5, 1, 0.5, true}}, {}, {}};
    const auto m = metrics(t);
    CHECK(m.component_sizes == std::vector<std::size_t>{3, 2, 1, 1});
    CHECK(m.largest_component == 3);
    CHECK(m.average_path_length == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("compare") {
    const auto s = star(6), p = path(6);
    CHECK(compare(s, s).common_edges == 5);
    CHECK(compare(s, s).jaccard == 1.0);
    CHECK(compare(s, p).common_edges == 1);
    CHECK(compare(s, p).common_edges == compare(p, s).common_edges);
    CHECK(compare(s, p).jaccard == doctest::Approx(1.0 / 9.0));
    Tree disjoint{names(6), {{1, 3, 1, 0.5, true}, {3, 5, 1, 0.5, true}}, {}, {}};
    CHECK(compare(s, disjoint).common_edges == 0);
    // Edges match by label, not by index.
    Tree relabelled = s;
    std::reverse(relabelled.labels.begin(), relabelled.labels.end());
    CHECK(compare(s, relabelled).common_edges == 1);  // only N100-N105 survives
    Tree empty{names(3), {}, {}, {}};
    CHECK(compare(empty, empty).jaccard == 1.0);
}

TEST_CASE("graph exports") {
    auto t = path(4);
    t.scale = 20;
    t.q = 2.0;
    AttributeMap attrs{{"N100", {"Tech", 4.0}}, {"N103", {"Energy", 1.0}}};
    const auto dot = to_dot(t, attrs);
    CHECK(dot.find("\"N100\" -- \"N101\"") != std::string::npos);
    CHECK(dot.find("penwidth") != std::string::npos);
    const auto gml = to_graphml(t, attrs);
    CHECK(gml.find("<graphml") != std::string::npos);
    CHECK(gml.find("Energy") != std::string::npos);
    const auto report = tree_report(t, metrics(t), nlohmann::json{{"seed", 1}});
    const auto back = tree_from_report(report);
    CHECK(back.labels == t.labels);
    CHECK(edge_set(back) == edge_set(t));
    CHECK(back.scale == t.scale);
}
