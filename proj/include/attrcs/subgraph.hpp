#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "attrcs/graph.hpp"
#include "attrcs/types.hpp"

namespace attrcs {

// Classic bucket peeling; O(|E|).
inline std::vector<int> core_decomposition(const AttributedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<int> deg(n), core(n, 0);
    std::size_t max_deg = 0;
    for (std::size_t v = 0; v < n; ++v) {
        deg[v] = static_cast<int>(g.degree(static_cast<NodeId>(v)));
        max_deg = std::max(max_deg, g.degree(static_cast<NodeId>(v)));
    }
    // bucket sort nodes by degree
    std::vector<std::size_t> bucket_start(max_deg + 2, 0);
    for (std::size_t v = 0; v < n; ++v) ++bucket_start[deg[v] + 1];
    for (std::size_t d = 1; d < bucket_start.size(); ++d) bucket_start[d] += bucket_start[d - 1];
    std::vector<NodeId> order(n);
    std::vector<std::size_t> pos(n);
    {
        auto cursor = bucket_start;
        for (std::size_t v = 0; v < n; ++v) {
            pos[v] = cursor[deg[v]]++;
            order[pos[v]] = static_cast<NodeId>(v);
        }
    }
    std::vector<std::size_t> bin = bucket_start;  // bin[d] = first index of degree-d zone
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId v = order[i];
        core[v] = deg[v];
        for (NodeId u : g.neighbors(v)) {
            if (deg[u] > deg[v]) {
                // swap u to the front of its degree zone, then shrink the zone
                const std::size_t pu = pos[u], pw = bin[deg[u]];
                const NodeId w = order[pw];
                if (u != w) {
                    std::swap(order[pu], order[pw]);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                ++bin[deg[u]];
                --deg[u];
            }
        }
    }
    return core;
}

// A mutable candidate community induced on a fixed member universe.
// Structural bookkeeping (degrees for the core model, per-edge triangle
// support for the truss model) is maintained incrementally, and every
// mutation is appended to an operation log so a deletion cascade can be
// rolled back in O(cascade).
class Subgraph {
public:
    struct UndoToken {
        std::size_t ops = 0;
    };

    struct MaintainResult {
        bool survived = false;       // q still present in a valid state
        NodeId v_m = 0;              // deleted node with maximal (f, -id)
        double v_m_dist = 0.0;
        std::size_t removed = 0;     // nodes removed by this transaction
    };

    Subgraph() = default;

    template <class NeighborFn>
    Subgraph(Model model, int k, std::vector<NodeId> members, NeighborFn&& nbrs)
        : model_(model), k_(k), ids_(std::move(members)) {
        std::sort(ids_.begin(), ids_.end());
        ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
        const std::size_t n = ids_.size();
        alive_.assign(n, 1);
        alive_count_ = n;
        adj_.assign(n, {});
        for (std::size_t i = 0; i < n; ++i) {
            for (NodeId u : nbrs(ids_[i])) {
                const auto it = std::lower_bound(ids_.begin(), ids_.end(), u);
                if (it == ids_.end() || *it != u) continue;
                adj_[i].push_back(static_cast<std::uint32_t>(it - ids_.begin()));
            }
            std::sort(adj_[i].begin(), adj_[i].end());
        }
        if (model_ == Model::kCore) {
            deg_.resize(n);
            for (std::size_t i = 0; i < n; ++i) deg_[i] = static_cast<int>(adj_[i].size());
        } else {
            init_truss();
        }
    }

    static Subgraph induced(const AttributedGraph& g, Model model, int k,
                            std::vector<NodeId> members) {
        return Subgraph(model, k, std::move(members),
                        [&g](NodeId v) -> const std::vector<NodeId>& { return g.neighbors(v); });
    }

    Model model() const { return model_; }
    int k() const { return k_; }
    std::size_t size() const { return alive_count_; }
    bool empty() const { return alive_count_ == 0; }

    bool contains(NodeId v) const {
        const auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
        return it != ids_.end() && *it == v && alive_[it - ids_.begin()];
    }

    std::vector<NodeId> members() const {
        std::vector<NodeId> out;
        out.reserve(alive_count_);
        for (std::size_t i = 0; i < ids_.size(); ++i)
            if (alive_[i]) out.push_back(ids_[i]);
        return out;
    }

    int induced_degree(NodeId v) const {
        const std::size_t i = local(v);
        return alive_[i] ? deg_[i] : 0;
    }

    std::size_t alive_edge_count() const {
        if (model_ == Model::kCore) {
            std::size_t c = 0;
            for (std::size_t i = 0; i < ids_.size(); ++i)
                if (alive_[i]) c += static_cast<std::size_t>(deg_[i]);
            return c / 2;
        }
        std::size_t c = 0;
        for (std::size_t e = 0; e < edges_.size(); ++e)
            if (edge_alive_[e]) ++c;
        return c;
    }

    UndoToken mark() const { return {ops_.size()}; }

    // Peels to the maximal valid state (min degree >= k, or every edge in
    // >= k-2 triangles) restricted to q's component. Returns true when q
    // survives. Not undoable past this point by callers that peel first.
    bool peel_to_valid(NodeId q) {
        if (model_ == Model::kCore) {
            std::deque<std::uint32_t> queue;
            for (std::size_t i = 0; i < ids_.size(); ++i)
                if (alive_[i] && deg_[i] < k_) queue.push_back(static_cast<std::uint32_t>(i));
            drain_core(queue);
        } else {
            std::deque<std::uint32_t> queue;
            for (std::size_t e = 0; e < edges_.size(); ++e)
                if (edge_alive_[e] && support_[e] < k_ - 2) queue.push_back(static_cast<std::uint32_t>(e));
            drain_truss(queue);
        }
        return restrict_to_component(q);
    }

    // Removes v, cascades structural maintenance, restricts to q's component.
    // v_m is the deleted node with maximal composite distance (ties to the
    // smaller id). Rollback with undo(token).
    template <class Dist>
    MaintainResult delete_and_maintain(NodeId v, NodeId q, Dist&& dist) {
        if (v == q) throw std::invalid_argument("cannot delete the query node");
        const std::size_t iv = local(v);
        if (!alive_[iv]) throw std::invalid_argument("node not in subgraph");
        const std::size_t op_start = ops_.size();
        if (model_ == Model::kCore) {
            std::deque<std::uint32_t> queue;
            remove_node_core(static_cast<std::uint32_t>(iv), queue);
            drain_core(queue);
        } else {
            std::deque<std::uint32_t> queue;
            kill_incident_edges(static_cast<std::uint32_t>(iv), queue);
            remove_node(static_cast<std::uint32_t>(iv));
            drain_truss(queue);
        }
        const bool q_alive = restrict_to_component(q);

        MaintainResult res;
        res.survived = q_alive && !empty();
        bool have = false;
        for (std::size_t p = op_start; p < ops_.size(); ++p) {
            if (ops_[p].kind != Op::kRemoveNode) continue;
            ++res.removed;
            const NodeId id = ids_[ops_[p].idx];
            const double d = dist(id);
            if (!have || d > res.v_m_dist || (d == res.v_m_dist && id < res.v_m)) {
                res.v_m = id;
                res.v_m_dist = d;
                have = true;
            }
        }
        return res;
    }

    void undo(UndoToken t) {
        while (ops_.size() > t.ops) {
            const Op op = ops_.back();
            ops_.pop_back();
            if (op.kind == Op::kRemoveNode) {
                alive_[op.idx] = 1;
                ++alive_count_;
                if (model_ == Model::kCore) {
                    int d = 0;
                    for (auto u : adj_[op.idx]) {
                        if (!alive_[u]) continue;
                        ++deg_[u];
                        ++d;
                    }
                    deg_[op.idx] = d;
                }
            } else {
                revive_edge(op.idx);
            }
        }
    }

    // Full structural recheck, used by tests and post-hoc validation.
    bool valid_community(NodeId q) const {
        if (!contains(q) || alive_count_ < model_minimum_size(model_, k_)) return false;
        if (model_ == Model::kCore) {
            for (std::size_t i = 0; i < ids_.size(); ++i) {
                if (!alive_[i]) continue;
                int d = 0;
                for (auto u : adj_[i])
                    if (alive_[u]) ++d;
                if (d < k_) return false;
            }
        } else {
            std::size_t edges = 0;
            for (std::size_t e = 0; e < edges_.size(); ++e) {
                if (!edge_alive_[e]) continue;
                ++edges;
                if (count_common(edges_[e].a, edges_[e].b) < k_ - 2) return false;
            }
            if (edges == 0) return false;
            for (std::size_t i = 0; i < ids_.size(); ++i)
                if (alive_[i] && deg_[i] == 0) return false;
        }
        // connectivity from q
        std::vector<char> seen(ids_.size(), 0);
        std::deque<std::uint32_t> bfs{static_cast<std::uint32_t>(local(q))};
        seen[bfs.front()] = 1;
        std::size_t reached = 0;
        while (!bfs.empty()) {
            const auto i = bfs.front();
            bfs.pop_front();
            ++reached;
            for_alive_neighbors(i, [&](std::uint32_t u) {
                if (!seen[u]) {
                    seen[u] = 1;
                    bfs.push_back(u);
                }
            });
        }
        return reached == alive_count_;
    }

private:
    struct Op {
        enum Kind : std::uint8_t { kRemoveNode, kKillEdge } kind;
        std::uint32_t idx;
    };
    struct Edge {
        std::uint32_t a, b;
    };

    std::size_t local(NodeId v) const {
        const auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
        if (it == ids_.end() || *it != v) throw std::invalid_argument("node not in member universe");
        return static_cast<std::size_t>(it - ids_.begin());
    }

    void init_truss() {
        const std::size_t n = ids_.size();
        inc_.assign(n, {});
        deg_.assign(n, 0);
        for (std::uint32_t i = 0; i < n; ++i) {
            for (auto u : adj_[i]) {
                if (u <= i) continue;
                const auto e = static_cast<std::uint32_t>(edges_.size());
                edges_.push_back({i, u});
                inc_[i].push_back({u, e});
                inc_[u].push_back({i, e});
            }
        }
        for (auto& lst : inc_) std::sort(lst.begin(), lst.end());
        edge_alive_.assign(edges_.size(), 1);
        support_.assign(edges_.size(), 0);
        for (std::size_t i = 0; i < n; ++i) deg_[i] = static_cast<int>(adj_[i].size());
        for (std::size_t e = 0; e < edges_.size(); ++e)
            support_[e] = count_common(edges_[e].a, edges_[e].b);
    }

    // Triangles through (a,b) whose other two edges are alive.
    int count_common(std::uint32_t a, std::uint32_t b) const {
        int c = 0;
        for_common_neighbors(a, b, [&](std::uint32_t, std::uint32_t, std::uint32_t) { ++c; });
        return c;
    }

    template <class Fn>
    void for_common_neighbors(std::uint32_t a, std::uint32_t b, Fn&& fn) const {
        const auto& la = inc_[a];
        const auto& lb = inc_[b];
        std::size_t i = 0, j = 0;
        while (i < la.size() && j < lb.size()) {
            if (la[i].first == lb[j].first) {
                const std::uint32_t c = la[i].first;
                if (alive_[c] && edge_alive_[la[i].second] && edge_alive_[lb[j].second])
                    fn(c, la[i].second, lb[j].second);
                ++i;
                ++j;
            } else if (la[i].first < lb[j].first) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    template <class Fn>
    void for_alive_neighbors(std::uint32_t i, Fn&& fn) const {
        if (model_ == Model::kCore) {
            for (auto u : adj_[i])
                if (alive_[u]) fn(u);
        } else {
            for (const auto& [u, e] : inc_[i])
                if (alive_[u] && edge_alive_[e]) fn(u);
        }
    }

    void remove_node(std::uint32_t i) {
        alive_[i] = 0;
        --alive_count_;
        ops_.push_back({Op::kRemoveNode, i});
    }

    void remove_node_core(std::uint32_t i, std::deque<std::uint32_t>& queue) {
        remove_node(i);
        for (auto u : adj_[i]) {
            if (!alive_[u]) continue;
            if (--deg_[u] < k_) queue.push_back(u);
        }
    }

    void drain_core(std::deque<std::uint32_t>& queue) {
        while (!queue.empty()) {
            const auto i = queue.front();
            queue.pop_front();
            if (!alive_[i]) continue;
            remove_node_core(i, queue);
        }
    }

    void kill_edge(std::uint32_t e, std::deque<std::uint32_t>& queue) {
        edge_alive_[e] = 0;
        ops_.push_back({Op::kKillEdge, e});
        const auto [a, b] = edges_[e];
        --deg_[a];
        --deg_[b];
        for_common_neighbors(a, b, [&](std::uint32_t, std::uint32_t ea, std::uint32_t eb) {
            if (--support_[ea] < k_ - 2) queue.push_back(ea);
            if (--support_[eb] < k_ - 2) queue.push_back(eb);
        });
    }

    void revive_edge(std::uint32_t e) {
        // exact mirror of kill_edge; replayed in reverse order the alive sets
        // match, so the recomputed support equals the value at kill time
        edge_alive_[e] = 1;
        const auto [a, b] = edges_[e];
        ++deg_[a];
        ++deg_[b];
        int sup = 0;
        for_common_neighbors(a, b, [&](std::uint32_t, std::uint32_t ea, std::uint32_t eb) {
            ++support_[ea];
            ++support_[eb];
            ++sup;
        });
        support_[e] = sup;
    }

    void kill_incident_edges(std::uint32_t i, std::deque<std::uint32_t>& queue) {
        for (const auto& [u, e] : inc_[i]) {
            if (!alive_[u] || !edge_alive_[e]) continue;
            kill_edge(e, queue);
        }
    }

    void drain_truss(std::deque<std::uint32_t>& queue) {
        while (!queue.empty()) {
            const auto e = queue.front();
            queue.pop_front();
            if (!edge_alive_[e]) continue;
            kill_edge(e, queue);
            for (auto i : {edges_[e].a, edges_[e].b})
                if (alive_[i] && deg_[i] == 0) remove_node(i);
        }
        // a node may be stranded when its last edge died inside kill_edge
        for (std::size_t i = 0; i < ids_.size(); ++i)
            if (alive_[i] && deg_[i] == 0) remove_node(static_cast<std::uint32_t>(i));
    }

    // Drops everything outside q's connected component. Triangles never cross
    // components, so supports of survivors are untouched.
    bool restrict_to_component(NodeId q) {
        const auto it = std::lower_bound(ids_.begin(), ids_.end(), q);
        if (it == ids_.end() || *it != q || !alive_[it - ids_.begin()]) {
            clear_all();
            return false;
        }
        const auto qi = static_cast<std::uint32_t>(it - ids_.begin());
        std::vector<char> seen(ids_.size(), 0);
        std::deque<std::uint32_t> bfs{qi};
        seen[qi] = 1;
        std::size_t reached = 0;
        while (!bfs.empty()) {
            const auto i = bfs.front();
            bfs.pop_front();
            ++reached;
            for_alive_neighbors(i, [&](std::uint32_t u) {
                if (!seen[u]) {
                    seen[u] = 1;
                    bfs.push_back(u);
                }
            });
        }
        if (reached == alive_count_) return true;
        for (std::uint32_t i = 0; i < ids_.size(); ++i) {
            if (!alive_[i] || seen[i]) continue;
            if (model_ == Model::kTruss) {
                std::deque<std::uint32_t> sink;
                for (const auto& [u, e] : inc_[i])
                    if (alive_[u] && edge_alive_[e]) kill_edge(e, sink);
                // support cascades stay inside the dying component
                while (!sink.empty()) sink.pop_front();
            } else {
                for (auto u : adj_[i])
                    if (alive_[u]) --deg_[u];
            }
            remove_node(i);
        }
        return true;
    }

    void clear_all() {
        std::deque<std::uint32_t> sink;
        for (std::uint32_t i = 0; i < ids_.size(); ++i) {
            if (!alive_[i]) continue;
            if (model_ == Model::kTruss) {
                for (const auto& [u, e] : inc_[i])
                    if (alive_[u] && edge_alive_[e]) kill_edge(e, sink);
            } else {
                for (auto u : adj_[i])
                    if (alive_[u]) --deg_[u];
            }
            remove_node(i);
        }
    }

    Model model_ = Model::kCore;
    int k_ = 0;
    std::vector<NodeId> ids_;  // sorted member universe (global ids)
    std::vector<char> alive_;
    std::size_t alive_count_ = 0;
    std::vector<std::vector<std::uint32_t>> adj_;  // local indices
    std::vector<int> deg_;                         // alive induced degree
    // truss state
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> inc_;  // (nbr, edge id)
    std::vector<char> edge_alive_;
    std::vector<int> support_;
    std::vector<Op> ops_;
};

namespace detail {

template <class NeighborFn>
std::vector<NodeId> reachable_from(NodeId q, std::size_t n_hint, NeighborFn&& nbrs) {
    std::vector<NodeId> comp{q};
    std::vector<char> seen(n_hint, 0);
    seen[q] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
        for (NodeId u : nbrs(comp[head])) {
            if (!seen[u]) {
                seen[u] = 1;
                comp.push_back(u);
            }
        }
    }
    return comp;
}

}  // namespace detail

// Maximal connected k-core containing q; empty subgraph when q is in none.
inline Subgraph maximal_connected_kcore(const AttributedGraph& g, NodeId q, int k) {
    if (q >= g.node_count()) throw std::out_of_range("query node not found");
    auto comp = detail::reachable_from(q, g.node_count(),
                                       [&g](NodeId v) -> const std::vector<NodeId>& { return g.neighbors(v); });
    Subgraph s = Subgraph::induced(g, Model::kCore, k, std::move(comp));
    s.peel_to_valid(q);
    return s;
}

// Maximal connected k-truss containing q (every edge in >= k-2 triangles).
// A nonempty k-truss automatically has >= k nodes; a stranded query node is
// peeled, so an empty result means q is in no k-truss.
inline Subgraph maximal_connected_ktruss(const AttributedGraph& g, NodeId q, int k) {
    if (q >= g.node_count()) throw std::out_of_range("query node not found");
    if (k < 2) throw std::invalid_argument("truss model requires k >= 2");
    auto comp = detail::reachable_from(q, g.node_count(),
                                       [&g](NodeId v) -> const std::vector<NodeId>& { return g.neighbors(v); });
    Subgraph s = Subgraph::induced(g, Model::kTruss, k, std::move(comp));
    s.peel_to_valid(q);
    return s;
}

inline Subgraph maximal_connected_structure(const AttributedGraph& g, NodeId q, int k, Model model) {
    return model == Model::kCore ? maximal_connected_kcore(g, q, k)
                                 : maximal_connected_ktruss(g, q, k);
}

// Induced subgraph on an arbitrary node set (no peeling).
inline Subgraph induced_subgraph(const AttributedGraph& g, std::vector<NodeId> nodes,
                                 Model model = Model::kCore, int k = 0) {
    return Subgraph::induced(g, model, k, std::move(nodes));
}

}  // namespace attrcs
