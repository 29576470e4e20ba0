#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "attrcs/distance.hpp"
#include "attrcs/estimator.hpp"
#include "attrcs/graph.hpp"
#include "attrcs/types.hpp"

namespace attrcs {

constexpr std::size_t kMaxMetaPathHops = 8;

// Typed node sequence T0-T1-...-TL with optional per-hop edge-type
// constraints; endpoints share the target type.
struct MetaPath {
    std::vector<std::uint32_t> node_types;                // L+1 entries
    std::vector<std::optional<std::uint32_t>> edge_types; // L entries
    std::uint32_t target_type() const { return node_types.front(); }
    std::size_t hops() const { return edge_types.size(); }
};

// A node-type label nobody carries; such a hop simply matches nothing.
constexpr std::uint32_t kAbsentType = 0xfffffffeu;

// Accepts "A-P-A" (node types only) or "T0-e0-T1-e1-T0" (alternating node and
// edge types). When both readings validate, the alternating one wins. The
// endpoint type must exist in the graph; interior types may be absent, which
// makes the path match nothing.
inline MetaPath parse_metapath(const AttributedGraph& g, const std::string& text) {
    if (!g.has_node_types()) throw ConfigError("meta-path requires a typed graph");
    const auto tokens = detail::split(text, '-');
    if (tokens.size() < 3 || tokens.size() % 2 == 0)
        throw ConfigError("meta-path must list an odd number of at least 3 labels: " + text);

    const auto build_node_only = [&]() -> std::optional<MetaPath> {
        MetaPath p;
        for (const auto& t : tokens)
            p.node_types.push_back(g.node_type_id(t).value_or(kAbsentType));
        if (p.node_types.front() == kAbsentType || p.node_types.back() == kAbsentType)
            return std::nullopt;
        p.edge_types.assign(tokens.size() - 1, std::nullopt);
        return p;
    };
    const auto build_alternating = [&]() -> std::optional<MetaPath> {
        if (tokens.size() < 5 || !g.has_edge_types()) return std::nullopt;
        MetaPath p;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i % 2 == 0) {
                const auto id = g.node_type_id(tokens[i]);
                if (!id) return std::nullopt;
                p.node_types.push_back(*id);
            } else {
                const auto id = g.edge_type_id(tokens[i]);
                if (!id) return std::nullopt;
                p.edge_types.push_back(*id);
            }
        }
        return p;
    };

    auto path = build_alternating();
    if (!path) path = build_node_only();
    if (!path) throw ConfigError("meta-path labels not found in graph: " + text);
    if (path->hops() > kMaxMetaPathHops)
        throw ConfigError("meta-path exceeds " + std::to_string(kMaxMetaPathHops) + " hops");
    if (path->node_types.front() != path->node_types.back())
        throw ConfigError("meta-path endpoints must share the target type: " + text);
    return *path;
}

// Layered typed expansion with per-layer dedup; memoized per query. The
// projection is never materialized globally, only on demand.
class PNeighborCache {
public:
    PNeighborCache(const AttributedGraph& g, MetaPath path) : g_(&g), path_(std::move(path)) {
        if (!g.has_node_types()) throw std::invalid_argument("graph has no node types");
        stamp_.assign(g.node_count(), 0);
    }

    const std::vector<NodeId>& operator()(NodeId v) {
        auto it = memo_.find(v);
        if (it != memo_.end()) return it->second;
        return memo_.emplace(v, expand(v)).first->second;
    }

    const MetaPath& path() const { return path_; }

private:
    std::vector<NodeId> expand(NodeId v) {
        if (g_->node_type(v) != path_.target_type())
            throw std::invalid_argument("node is not of the meta-path target type");
        std::vector<NodeId> cur{v};
        for (std::size_t hop = 0; hop < path_.hops(); ++hop) {
            ++epoch_;
            std::vector<NodeId> next;
            const std::uint32_t want_type = path_.node_types[hop + 1];
            const auto want_edge = path_.edge_types[hop];
            for (NodeId u : cur) {
                const auto& nbr = g_->neighbors(u);
                const auto* et = g_->has_edge_types() ? &g_->neighbor_edge_types(u) : nullptr;
                for (std::size_t i = 0; i < nbr.size(); ++i) {
                    const NodeId w = nbr[i];
                    if (g_->node_type(w) != want_type) continue;
                    if (want_edge && (!et || (*et)[i] != *want_edge)) continue;
                    if (stamp_[w] == epoch_) continue;
                    stamp_[w] = epoch_;
                    next.push_back(w);
                }
            }
            cur = std::move(next);
        }
        cur.erase(std::remove(cur.begin(), cur.end(), v), cur.end());
        std::sort(cur.begin(), cur.end());
        return cur;
    }

    const AttributedGraph* g_;
    MetaPath path_;
    std::unordered_map<NodeId, std::vector<NodeId>> memo_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

inline std::vector<NodeId> p_neighbors(const AttributedGraph& g, NodeId v, const MetaPath& path) {
    PNeighborCache cache(g, path);
    return cache(v);
}

// SEA over (k,P)-core / (k,P)-truss semantics: structure counted in
// P-neighbors, the Hoeffding population is the target-type node count, and
// the attribute distance ranges over target nodes only.
inline SeaResult sea_search_hetero(const AttributedGraph& g, NodeId q, int k, const MetaPath& path,
                                   const DistanceEvaluator& dist, const SeaParams& prm,
                                   Model model = Model::kCore,
                                   std::optional<SizeBounds> bounds = std::nullopt) {
    if (q >= g.node_count()) {
        SeaResult out;
        out.model = model;
        out.k = k;
        out.reason = "query node not found";
        return out;
    }
    if (g.node_type(q) != path.target_type())
        throw std::invalid_argument("query node is not of the meta-path target type");
    PNeighborCache cache(g, path);
    const std::size_t n_pop = g.count_of_type(path.target_type());
    return sea_search_impl(
        n_pop, g.node_count(), q, k, model,
        [&cache](NodeId v) -> const std::vector<NodeId>& { return cache(v); },
        [&dist](NodeId v) { return dist(v); }, prm, bounds);
}

// Test utility: the explicit homogeneous projection of the meta-path view.
// Target nodes keep their external ids and relative order, and the original
// normalization bounds are carried over, so runs on the projection are
// comparable node-for-node with the lazy variant.
inline AttributedGraph materialize_projection(const AttributedGraph& g, const MetaPath& path) {
    AttributedGraph::Builder b;
    std::vector<NodeId> targets;
    for (NodeId v = 0; v < g.node_count(); ++v)
        if (g.node_type(v) == path.target_type()) targets.push_back(v);
    for (NodeId v : targets) b.intern_node(g.ext_id(v));
    PNeighborCache cache(g, path);
    for (NodeId v : targets) {
        const NodeId lv = b.intern_node(g.ext_id(v));
        for (NodeId w : cache(v)) {
            if (w <= v) continue;  // undirected, add once
            b.add_edge(lv, b.intern_node(g.ext_id(w)));
        }
    }
    for (NodeId v : targets) {
        const NodeId lv = b.intern_node(g.ext_id(v));
        std::vector<std::string> toks;
        for (auto t : g.tokens(v)) toks.push_back(g.token_name(t));
        b.set_tokens(lv, toks);
        std::vector<double> nums;
        for (std::size_t d = 0; d < g.numeric_dims(); ++d) nums.push_back(g.numeric_raw(v, d));
        if (!nums.empty()) b.set_numeric(lv, nums);
    }
    std::vector<double> lo(g.numeric_dims()), hi(g.numeric_dims());
    for (std::size_t d = 0; d < g.numeric_dims(); ++d) std::tie(lo[d], hi[d]) = g.norm_range(d);
    return b.finalize_with_norms(g.numeric_dims(), lo, hi);
}

}  // namespace attrcs
