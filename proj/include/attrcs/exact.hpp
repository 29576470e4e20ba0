#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "attrcs/distance.hpp"
#include "attrcs/subgraph.hpp"
#include "attrcs/types.hpp"

namespace attrcs {

struct PruneMask {
    bool p1 = true;  // duplicate states
    bool p2 = true;  // unnecessary states (only delete f(.,q) > delta nodes)
    bool p3 = true;  // unpromising states (lower bound vs best delta)
};

struct Budget {
    std::uint64_t max_states = 0;  // 0 = unlimited
    double max_seconds = 0.0;      // 0 = unlimited
};

struct EnumStats {
    std::uint64_t explored = 0;   // states scored (root included)
    std::uint64_t pruned_p1 = 0;  // children discarded as duplicates
    std::uint64_t pruned_p2 = 0;  // deletions never generated (f <= delta)
    std::uint64_t pruned_p3 = 0;  // frames cut by the lower bound
    std::uint64_t collapsed = 0;  // deletions that destroyed the query's community
    bool budget_exhausted = false;
    double elapsed_ms = 0.0;
};

struct ExactResult {
    bool found = false;
    std::vector<NodeId> members;  // sorted
    double delta_star = std::numeric_limits<double>::infinity();
    EnumStats stats;
    std::string reason;
};

// Strict total order on deletions: larger composite distance first, ties to
// the smaller node id. The enumeration's duplicate argument needs a total
// order even when distances collide.
struct OrderKey {
    double dist = 0.0;
    NodeId id = 0;
};

inline bool order_after(const OrderKey& a, const OrderKey& b) {
    // true when a ranks strictly before b in deletion order (a "greater")
    if (a.dist != b.dist) return a.dist > b.dist;
    return a.id < b.id;
}

// Mean of the `count` smallest f(.,q) values among non-query members; +inf
// when the state cannot host any substate of the model's minimum size.
template <class Dist>
double lower_bound_delta(const std::vector<NodeId>& members, NodeId q, std::size_t count,
                         Dist&& dist) {
    std::vector<double> vals;
    vals.reserve(members.size());
    for (NodeId v : members)
        if (v != q) vals.push_back(dist(v));
    if (vals.size() < count || count == 0) return std::numeric_limits<double>::infinity();
    std::nth_element(vals.begin(), vals.begin() + (count - 1), vals.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) sum += vals[i];
    return sum / static_cast<double>(count);
}

inline bool should_prune_duplicate(const OrderKey& v_m, const OrderKey& prev_deleted) {
    return order_after(v_m, prev_deleted);
}

inline bool should_prune_unpromising(double lb, double delta_star) { return lb >= delta_star; }

// Exhaustive DFS over connected k-core (or k-truss) substates containing q,
// children generated in descending (f, id) order of the deleted node, with
// the three prunings gated by `mask`. Size bounds, when present, filter which
// states may become the answer; they also force P2 off, since reaching an
// in-range state may require deleting nodes with f(.,q) <= delta.
template <class Dist>
ExactResult exact_search(const AttributedGraph& g, NodeId q, int k, Dist&& dist,
                         Model model = Model::kCore, PruneMask mask = {}, Budget budget = {},
                         std::optional<SizeBounds> bounds = std::nullopt) {
    const auto t0 = std::chrono::steady_clock::now();
    ExactResult out;
    if (q >= g.node_count()) {
        out.reason = "query node not found";
        return out;
    }
    if (bounds) {
        validate_bounds(*bounds, model, k);
        mask.p2 = false;
    }

    Subgraph state = maximal_connected_structure(g, q, k, model);
    if (!state.contains(q)) {
        out.reason = std::string("query node is not in any ") + model_name(model) +
                     " community for k=" + std::to_string(k);
        return out;
    }

    const std::size_t lb_count = model_minimum_size(model, k) - 1;
    const auto in_range = [&](std::size_t sz) {
        return !bounds || (sz >= bounds->lo && sz <= bounds->hi);
    };
    const auto elapsed_s = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    struct Cand {
        OrderKey key;
    };
    struct Frame {
        Subgraph::UndoToken undo;   // state to restore when this frame closes
        OrderKey creator;           // deletion that produced this state
        std::vector<Cand> agenda;   // descending (f, id)
        std::size_t next = 0;
        bool entered = false;
    };

    double best_delta = std::numeric_limits<double>::infinity();
    std::vector<NodeId> best_members;
    bool have_best = false;

    const auto score_state = [&](const std::vector<NodeId>& members) {
        ++out.stats.explored;
        const double delta = community_attribute_distance(members, q, dist);
        if (in_range(members.size()) &&
            (!have_best || community_better(delta, members, best_delta, best_members))) {
            best_delta = delta;
            best_members = members;
            have_best = true;
        }
        return delta;
    };

    const auto make_agenda = [&](const std::vector<NodeId>& members, double delta) {
        std::vector<Cand> agenda;
        for (NodeId v : members) {
            if (v == q) continue;
            const double f = dist(v);
            if (mask.p2 && f <= delta) {
                ++out.stats.pruned_p2;
                continue;
            }
            agenda.push_back({{f, v}});
        }
        std::sort(agenda.begin(), agenda.end(),
                  [](const Cand& a, const Cand& b) { return order_after(a.key, b.key); });
        return agenda;
    };

    const auto root_members = state.members();
    const double root_delta = score_state(root_members);

    std::vector<Frame> stack;
    stack.push_back({state.mark(),
                     {std::numeric_limits<double>::infinity(), 0},
                     make_agenda(root_members, root_delta),
                     0,
                     false});

    while (!stack.empty()) {
        Frame& fr = stack.back();
        if (!fr.entered) {
            fr.entered = true;
            if (mask.p3) {
                const double lb = lower_bound_delta(state.members(), q, lb_count, dist);
                if (should_prune_unpromising(lb, best_delta)) {
                    ++out.stats.pruned_p3;
                    state.undo(fr.undo);
                    stack.pop_back();
                    continue;
                }
            }
            // no substate of a minimum-size or below-l state can qualify
            if (state.size() <= model_minimum_size(model, k) ||
                (bounds && state.size() <= bounds->lo)) {
                state.undo(fr.undo);
                stack.pop_back();
                continue;
            }
        }
        if (fr.next >= fr.agenda.size()) {
            state.undo(fr.undo);
            stack.pop_back();
            continue;
        }
        if ((budget.max_states && out.stats.explored >= budget.max_states) ||
            (budget.max_seconds > 0 && elapsed_s() >= budget.max_seconds)) {
            out.stats.budget_exhausted = true;
            while (!stack.empty()) {
                state.undo(stack.back().undo);
                stack.pop_back();
            }
            break;
        }

        const Cand cand = fr.agenda[fr.next++];
        const auto token = state.mark();
        const auto res = state.delete_and_maintain(cand.key.id, q, dist);
        if (!res.survived) {
            ++out.stats.collapsed;
            state.undo(token);
            continue;
        }
        if (mask.p1 && should_prune_duplicate({res.v_m_dist, res.v_m}, fr.creator)) {
            ++out.stats.pruned_p1;
            state.undo(token);
            continue;
        }
        const auto members = state.members();
        const double delta = score_state(members);
        stack.push_back({token, cand.key, make_agenda(members, delta), 0, false});
    }

    out.stats.elapsed_ms = elapsed_s() * 1e3;
    if (!have_best) {
        out.reason = "no community satisfies the size bounds";
        return out;
    }
    out.found = true;
    out.members = best_members;
    out.delta_star = best_delta;
    return out;
}

}  // namespace attrcs
