#pragma once

// Shared test utilities: fixture loading, small random attributed graphs,
// and naive structural oracles kept deliberately independent of the library's
// incremental maintenance code.

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "attrcs/distance.hpp"
#include "attrcs/graph.hpp"
#include "attrcs/types.hpp"

namespace testutil {

using attrcs::AttributedGraph;
using attrcs::Model;
using attrcs::NodeId;

inline std::string data_path(const std::string& rel) {
    return std::string(ATTRCS_SOURCE_DIR) + "/" + rel;
}

inline attrcs::GraphBundle load_toy() {
    std::ifstream edges(data_path("data/toy/edges.tsv"));
    std::ifstream attrs(data_path("data/toy/attrs.tsv"));
    return attrcs::load_graph(edges, &attrs);
}

// Build a graph from explicit parts; numeric values are raw (normalization
// bounds come from the data itself).
inline AttributedGraph make_graph(std::size_t n, const std::vector<std::pair<int, int>>& edges,
                                  const std::vector<std::vector<double>>& numerics = {},
                                  const std::vector<std::vector<std::string>>& tokens = {}) {
    AttributedGraph::Builder b;
    for (std::size_t v = 0; v < n; ++v) b.intern_node(std::to_string(v));
    for (auto [u, v] : edges) b.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
    for (std::size_t v = 0; v < numerics.size(); ++v)
        if (!numerics[v].empty()) b.set_numeric(static_cast<NodeId>(v), numerics[v]);
    for (std::size_t v = 0; v < tokens.size(); ++v)
        if (!tokens[v].empty()) b.set_tokens(static_cast<NodeId>(v), tokens[v]);
    return b.finalize();
}

// Erdos-Renyi graph with uniform random single-dimension attributes in [0,1].
inline AttributedGraph random_attributed_graph(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    AttributedGraph::Builder b;
    for (std::size_t v = 0; v < n; ++v) b.intern_node(std::to_string(v));
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
            if (uni(rng) < p) b.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
    for (std::size_t v = 0; v < n; ++v) b.set_numeric(static_cast<NodeId>(v), {uni(rng)});
    return b.finalize();
}

// --- independent structural oracles -------------------------------------

// Peel-then-component k-core by repeated full scans.
inline std::vector<NodeId> naive_connected_kcore(const AttributedGraph& g, NodeId q, int k,
                                                 const std::vector<NodeId>* restrict_to = nullptr) {
    const std::size_t n = g.node_count();
    std::vector<char> alive(n, 0);
    if (restrict_to) {
        for (NodeId v : *restrict_to) alive[v] = 1;
    } else {
        std::fill(alive.begin(), alive.end(), 1);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t v = 0; v < n; ++v) {
            if (!alive[v]) continue;
            int d = 0;
            for (NodeId u : g.neighbors(static_cast<NodeId>(v)))
                if (alive[u]) ++d;
            if (d < k) {
                alive[v] = 0;
                changed = true;
            }
        }
    }
    if (!alive[q]) return {};
    std::vector<NodeId> comp{q};
    std::vector<char> seen(n, 0);
    seen[q] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head)
        for (NodeId u : g.neighbors(comp[head]))
            if (alive[u] && !seen[u]) {
                seen[u] = 1;
                comp.push_back(u);
            }
    std::sort(comp.begin(), comp.end());
    return comp;
}

// Iterated edge-support peeling k-truss, then q's component over surviving
// edges.
inline std::vector<NodeId> naive_connected_ktruss(const AttributedGraph& g, NodeId q, int k,
                                                  const std::vector<NodeId>* restrict_to = nullptr) {
    const std::size_t n = g.node_count();
    std::vector<char> in(n, 0);
    if (restrict_to) {
        for (NodeId v : *restrict_to) in[v] = 1;
    } else {
        std::fill(in.begin(), in.end(), 1);
    }
    std::set<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < n; ++u) {
        if (!in[u]) continue;
        for (NodeId v : g.neighbors(u))
            if (u < v && in[v]) edges.insert({u, v});
    }
    const auto support = [&edges](NodeId a, NodeId b, const AttributedGraph& gg) {
        int s = 0;
        for (NodeId w : gg.neighbors(a)) {
            if (w == b) continue;
            if (edges.count({std::min(a, w), std::max(a, w)}) &&
                edges.count({std::min(b, w), std::max(b, w)}))
                ++s;
        }
        return s;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = edges.begin(); it != edges.end();) {
            if (support(it->first, it->second, g) < k - 2) {
                it = edges.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    // component of q over the surviving edges
    std::vector<NodeId> comp{q};
    std::vector<char> seen(n, 0);
    seen[q] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head)
        for (NodeId u : g.neighbors(comp[head])) {
            const auto e = std::minmax(comp[head], u);
            if (!seen[u] && edges.count({e.first, e.second})) {
                seen[u] = 1;
                comp.push_back(u);
            }
        }
    if (comp.size() < attrcs::model_minimum_size(Model::kTruss, k)) return {};
    std::sort(comp.begin(), comp.end());
    return comp;
}

inline std::vector<NodeId> naive_structure(const AttributedGraph& g, NodeId q, int k, Model model,
                                           const std::vector<NodeId>* restrict_to = nullptr) {
    return model == Model::kCore ? naive_connected_kcore(g, q, k, restrict_to)
                                 : naive_connected_ktruss(g, q, k, restrict_to);
}

// Typed fixture: authors ("A") linked to papers ("P") by "writes" edges;
// co-authorship is the A-P-A meta-path. Only authors carry attributes, so a
// materialized projection recomputes identical normalization bounds.
struct TypedFixture {
    AttributedGraph graph;
    std::vector<NodeId> authors;
};

inline TypedFixture make_typed(std::size_t n_authors, std::size_t n_papers, double p_link,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    AttributedGraph::Builder b;
    TypedFixture fx;
    for (std::size_t a = 0; a < n_authors; ++a) {
        const auto id = b.intern_node("a" + std::to_string(a));
        b.set_node_type(id, "A");
        b.set_numeric(id, {uni(rng)});
        fx.authors.push_back(id);
    }
    for (std::size_t p = 0; p < n_papers; ++p) {
        const auto id = b.intern_node("p" + std::to_string(p));
        b.set_node_type(id, "P");
        std::size_t links = 0;
        for (std::size_t a = 0; a < n_authors; ++a)
            if (uni(rng) < p_link) {
                b.add_edge(id, fx.authors[a], "writes");
                ++links;
            }
        if (links == 0) b.add_edge(id, fx.authors[rng() % n_authors], "writes");
    }
    b.set_numeric(fx.authors[0], {0.0});
    b.set_numeric(fx.authors[1 % n_authors], {1.0});
    fx.graph = b.finalize(1);
    return fx;
}

}  // namespace testutil
