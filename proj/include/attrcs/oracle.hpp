#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "attrcs/distance.hpp"
#include "attrcs/graph.hpp"
#include "attrcs/types.hpp"

namespace attrcs {

struct BruteResult {
    bool found = false;
    std::vector<NodeId> members;
    double delta_star = 0.0;
};

namespace detail {

// Direct definition checks on a candidate node set; deliberately naive and
// shared with nothing in the enumeration machinery.
//
// Core model: the induced subgraph has min degree >= k and is connected
// through q. Truss model: a k-truss is an edge subgraph (peeling removes
// edges, and surviving nodes can still have induced edges outside the
// truss), so the set is valid when the connected k-truss of the induced
// subgraph around q spans exactly this node set.
inline bool subset_is_valid_community(const AttributedGraph& g, const std::vector<NodeId>& set,
                                      NodeId q, int k, Model model) {
    if (set.size() < model_minimum_size(model, k)) return false;
    const auto in_set = [&](NodeId v) { return std::binary_search(set.begin(), set.end(), v); };
    if (!in_set(q)) return false;
    if (model == Model::kCore) {
        for (NodeId v : set) {
            int d = 0;
            for (NodeId u : g.neighbors(v))
                if (in_set(u)) ++d;
            if (d < k) return false;
        }
        std::vector<NodeId> seenlist{q};
        std::vector<char> seen(g.node_count(), 0);
        seen[q] = 1;
        for (std::size_t head = 0; head < seenlist.size(); ++head)
            for (NodeId u : g.neighbors(seenlist[head]))
                if (in_set(u) && !seen[u]) {
                    seen[u] = 1;
                    seenlist.push_back(u);
                }
        return seenlist.size() == set.size();
    }

    // truss: peel induced edges by support, then walk q's component
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::unordered_map<std::uint64_t, std::size_t> edge_idx;
    const auto key = [](NodeId a, NodeId b) {
        return (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
    };
    for (NodeId v : set)
        for (NodeId u : g.neighbors(v))
            if (v < u && in_set(u)) {
                edge_idx.emplace(key(v, u), edges.size());
                edges.push_back({v, u});
            }
    std::vector<char> edge_alive(edges.size(), 1);
    const auto alive_edge = [&](NodeId a, NodeId b) {
        const auto it = edge_idx.find(key(a, b));
        return it != edge_idx.end() && edge_alive[it->second];
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (!edge_alive[e]) continue;
            int tri = 0;
            for (NodeId w : g.neighbors(edges[e].first))
                if (w != edges[e].second && in_set(w) && alive_edge(edges[e].first, w) &&
                    alive_edge(edges[e].second, w))
                    ++tri;
            if (tri < k - 2) {
                edge_alive[e] = 0;
                changed = true;
            }
        }
    }
    std::vector<NodeId> comp{q};
    std::vector<char> seen(g.node_count(), 0);
    seen[q] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head)
        for (NodeId u : g.neighbors(comp[head]))
            if (in_set(u) && !seen[u] && alive_edge(comp[head], u)) {
                seen[u] = 1;
                comp.push_back(u);
            }
    return comp.size() == set.size();
}

}  // namespace detail

// Exhaustive minimum-delta search over every node subset of q's component
// that forms a valid connected k-core / k-truss containing q. Guarded to tiny
// components; exists as an implementation-independent reference.
template <class Dist>
BruteResult brute_force_optimum(const AttributedGraph& g, NodeId q, int k, Model model,
                                Dist&& dist, std::optional<SizeBounds> bounds = std::nullopt,
                                std::size_t guard = 20) {
    if (q >= g.node_count()) throw std::out_of_range("query node not found");
    std::vector<NodeId> comp{q};
    {
        std::vector<char> seen(g.node_count(), 0);
        seen[q] = 1;
        for (std::size_t head = 0; head < comp.size(); ++head)
            for (NodeId u : g.neighbors(comp[head]))
                if (!seen[u]) {
                    seen[u] = 1;
                    comp.push_back(u);
                }
    }
    if (comp.size() > guard)
        throw std::length_error("component exceeds the brute-force guard of " +
                                std::to_string(guard) + " nodes");
    std::vector<NodeId> others;
    for (NodeId v : comp)
        if (v != q) others.push_back(v);
    std::sort(others.begin(), others.end());

    BruteResult best;
    const std::uint32_t masks = 1u << others.size();
    for (std::uint32_t m = 0; m < masks; ++m) {
        std::vector<NodeId> set{q};
        for (std::size_t i = 0; i < others.size(); ++i)
            if (m & (1u << i)) set.push_back(others[i]);
        std::sort(set.begin(), set.end());
        if (set.size() < 2) continue;
        if (bounds && (set.size() < bounds->lo || set.size() > bounds->hi)) continue;
        if (!detail::subset_is_valid_community(g, set, q, k, model)) continue;
        const double delta = community_attribute_distance(set, q, dist);
        if (!best.found || community_better(delta, set, best.delta_star, best.members)) {
            best.found = true;
            best.members = std::move(set);
            best.delta_star = delta;
        }
    }
    return best;
}

}  // namespace attrcs
