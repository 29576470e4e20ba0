#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "attrcs/graph.hpp"
#include "attrcs/types.hpp"

namespace attrcs {

struct DistanceParams {
    double gamma = 0.5;  // weight of the textual component
    NodeId query = 0;
};

// Jaccard distance over interned token sets. Two empty sets count as
// identical (distance 0); the 0/0 case is the only one the formula leaves
// open.
inline double textual_distance(const AttributedGraph& g, NodeId u, NodeId v) {
    const auto& a = g.tokens(u);
    const auto& b = g.tokens(v);
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

// Mean absolute difference of min-max normalized coordinates. Dimensions
// where either value is missing are skipped and the denominator shrinks; if
// nothing is comparable the nodes are maximally dissimilar.
inline double numerical_distance(const AttributedGraph& g, NodeId u, NodeId v) {
    const std::size_t dims = g.numeric_dims();
    if (dims == 0) return 0.0;  // no numeric schema at all: f(v,v) stays 0
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t d = 0; d < dims; ++d) {
        const double zu = g.normalized(u, d);
        const double zv = g.normalized(v, d);
        if (std::isnan(zu) || std::isnan(zv)) continue;
        acc += std::fabs(zu - zv);
        ++used;
    }
    if (used == 0) return 1.0;
    return acc / static_cast<double>(used);
}

inline double composite_distance(const AttributedGraph& g, NodeId u, NodeId v, double gamma) {
    const double f = gamma * textual_distance(g, u, v) + (1.0 - gamma) * numerical_distance(g, u, v);
    return std::clamp(f, 0.0, 1.0);
}

// Memoized f(.,q) for one query. Single-writer; the memo is transparent:
// results are bit-identical with and without it.
class DistanceEvaluator {
public:
    DistanceEvaluator(const AttributedGraph& g, DistanceParams params)
        : g_(&g), params_(params), memo_(g.node_count(), kMissing) {}

    double operator()(NodeId v) const {
        double& slot = memo_[v];
        if (std::isnan(slot)) slot = composite_distance(*g_, v, params_.query, params_.gamma);
        return slot;
    }

    NodeId query() const { return params_.query; }
    const AttributedGraph& graph() const { return *g_; }
    const DistanceParams& params() const { return params_; }

private:
    const AttributedGraph* g_;
    DistanceParams params_;
    mutable std::vector<double> memo_;
};

// Kahan-compensated mean of f(u,q) over members \ {q}; order is fixed by the
// member list so results are reproducible bit for bit.
template <class Dist>
double community_attribute_distance(const std::vector<NodeId>& members, NodeId q, Dist&& dist) {
    if (members.size() < 2) throw std::invalid_argument("attribute distance needs >= 2 members");
    bool has_q = false;
    double sum = 0.0, comp = 0.0;
    std::size_t n = 0;
    for (NodeId v : members) {
        if (v == q) {
            has_q = true;
            continue;
        }
        const double y = dist(v) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        ++n;
    }
    if (!has_q) throw std::invalid_argument("query node not in community");
    return sum / static_cast<double>(n);
}

// Deterministic preference order between equally valid communities: smaller
// attribute distance, then larger size, then lexicographically smaller sorted
// member list.
inline bool community_better(double delta_a, const std::vector<NodeId>& a, double delta_b,
                             const std::vector<NodeId>& b) {
    if (delta_a != delta_b) return delta_a < delta_b;
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
}

}  // namespace attrcs
