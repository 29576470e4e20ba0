#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "attrcs/graph.hpp"
#include "attrcs/rng.hpp"
#include "attrcs/types.hpp"

namespace attrcs {

// Planted-community fixture: a clique around the query with tightly
// clustered attribute distances, optional decoy members at intermediate
// distances, all embedded in a sparse random background with dissimilar
// attributes. Two pinned extreme nodes make min-max normalization the
// identity, so target distances are hit exactly.
struct PlantedConfig {
    std::size_t n = 1000;        // total nodes
    std::size_t clique = 16;     // planted clique size, query included
    std::size_t decoys = 0;      // clique-attached nodes at intermediate distance
    int k = 3;                   // structural parameter the fixture is built for
    double avg_degree = 1.5;     // background G(n,p) expected degree
    double delta_base = 0.3;     // planted numeric offset from the query
    double delta_jitter = 0.001; // uniform jitter on the planted offset
    double decoy_lo = 0.45;      // decoy numeric offset range
    double decoy_hi = 0.85;
    double bg_lo = 0.0;          // background raw value range
    double bg_hi = 1.0;
    std::uint64_t seed = 1;
};

struct PlantedFixture {
    AttributedGraph graph;
    NodeId query = 0;
    std::size_t clique = 0;
};

inline PlantedFixture make_planted(const PlantedConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, 0x9e4ull));
    AttributedGraph::Builder b;
    const std::size_t n = std::max<std::size_t>(cfg.n, cfg.clique + cfg.decoys + 4);
    for (std::size_t v = 0; v < n; ++v) b.intern_node(std::to_string(v));

    const std::size_t c = cfg.clique;
    for (std::size_t u = 0; u < c; ++u)
        for (std::size_t v = u + 1; v < c; ++v)
            b.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));

    // each decoy joins the core with exactly k clique edges
    const std::size_t d0 = c;
    for (std::size_t i = 0; i < cfg.decoys; ++i) {
        const auto dv = static_cast<NodeId>(d0 + i);
        std::size_t attached = 0;
        while (attached < static_cast<std::size_t>(cfg.k)) {
            const auto t = static_cast<NodeId>(rng.below(c));
            if (b.add_edge(dv, t)) ++attached;
        }
    }

    // sparse background: n*avg_degree/2 random pairs, planted pairs untouched
    const std::size_t bg0 = d0 + cfg.decoys;
    const auto want_edges =
        static_cast<std::size_t>(std::llround(cfg.avg_degree * static_cast<double>(n) / 2.0));
    std::size_t added = 0, attempts = 0;
    while (added < want_edges && attempts < 20 * want_edges + 100) {
        ++attempts;
        const auto a = static_cast<NodeId>(rng.below(n));
        const auto c2 = static_cast<NodeId>(rng.below(n));
        if (a == c2) continue;
        if (a < bg0 && c2 < bg0) continue;  // keep the planted structure as built
        if (b.add_edge(a, c2)) ++added;
    }

    // attributes: one numeric dimension plus a shared token for the planted
    // side, distinct tokens for the background
    const double q_val = 0.0;
    b.set_tokens(0, {"c0"});
    b.set_numeric(0, {q_val});
    for (std::size_t v = 1; v < c; ++v) {
        const double jitter = (2.0 * rng.uniform() - 1.0) * cfg.delta_jitter;
        b.set_tokens(static_cast<NodeId>(v), {"c0"});
        b.set_numeric(static_cast<NodeId>(v), {q_val + cfg.delta_base + jitter});
    }
    for (std::size_t i = 0; i < cfg.decoys; ++i) {
        const double off = cfg.decoy_lo + (cfg.decoy_hi - cfg.decoy_lo) * rng.uniform();
        b.set_tokens(static_cast<NodeId>(d0 + i), {"c0"});
        b.set_numeric(static_cast<NodeId>(d0 + i), {q_val + off});
    }
    for (std::size_t v = bg0; v < n; ++v) {
        const double raw = cfg.bg_lo + (cfg.bg_hi - cfg.bg_lo) * rng.uniform();
        b.set_tokens(static_cast<NodeId>(v), {"b" + std::to_string(v % 7)});
        b.set_numeric(static_cast<NodeId>(v), {raw});
    }
    // pin the normalization range to [0,1]
    b.set_tokens(static_cast<NodeId>(bg0), {"b0"});
    b.set_numeric(static_cast<NodeId>(bg0), {0.0});
    b.set_tokens(static_cast<NodeId>(bg0 + 1), {"b1"});
    b.set_numeric(static_cast<NodeId>(bg0 + 1), {1.0});

    PlantedFixture fx{b.finalize(1), 0, c};
    return fx;
}

inline void write_fixture_files(const PlantedConfig& cfg, std::ostream& edges,
                                std::ostream& attrs) {
    const PlantedFixture fx = make_planted(cfg);
    const auto& g = fx.graph;
    attrs.precision(17);  // values round-trip through the text format
    edges << "# planted-community fixture, seed " << cfg.seed << "\n";
    for (NodeId u = 0; u < g.node_count(); ++u)
        for (NodeId v : g.neighbors(u))
            if (u < v) edges << g.ext_id(u) << '\t' << g.ext_id(v) << '\n';
    for (NodeId v = 0; v < g.node_count(); ++v) {
        attrs << g.ext_id(v) << '\t';
        const auto& toks = g.tokens(v);
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (i) attrs << ',';
            attrs << g.token_name(toks[i]);
        }
        attrs << '\t';
        for (std::size_t d = 0; d < g.numeric_dims(); ++d) {
            if (d) attrs << ',';
            const double x = g.numeric_raw(v, d);
            if (std::isnan(x))
                attrs << "NA";
            else
                attrs << x;
        }
        attrs << '\n';
    }
}

}  // namespace attrcs
