#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "attrcs/graph.hpp"
#include "attrcs/subgraph.hpp"
#include "helpers.hpp"

using namespace attrcs;
using testutil::load_toy;
using testutil::make_graph;
using testutil::naive_connected_kcore;
using testutil::naive_connected_ktruss;
using testutil::random_attributed_graph;

TEST_CASE("load: dedup, self-loops, comments") {
    std::istringstream edges("# header\n0\t1\n1\t0\n1\t1\n");
    std::istringstream attrs("");
    auto bundle = load_graph(edges, &attrs);
    CHECK(bundle.graph.node_count() == 2);
    CHECK(bundle.graph.edge_count() == 1);
    CHECK(bundle.stats.duplicate_edges == 1);
    CHECK(bundle.stats.self_loops == 1);
}

TEST_CASE("load: sample graph shape") {
    auto bundle = load_toy();
    const auto& g = bundle.graph;
    REQUIRE(g.node_count() == 12);
    const auto v12 = g.find("v12");
    REQUIRE(v12);
    CHECK(g.degree(*v12) == 1);
    CHECK(g.numeric_dims() == 1);
    // adjacency symmetric
    for (NodeId v = 0; v < g.node_count(); ++v)
        for (NodeId u : g.neighbors(v)) CHECK(g.has_edge(u, v));
}

TEST_CASE("load: attribute-only node becomes isolated, with warning") {
    std::istringstream edges("a\tb\n");
    std::istringstream attrs("a\tx\t1\nb\ty\t2\nc\tz\t3\n");
    auto bundle = load_graph(edges, &attrs);
    CHECK(bundle.graph.node_count() == 3);
    CHECK(bundle.stats.isolated_from_attrs == 1);
    REQUIRE(bundle.graph.find("c"));
    CHECK(bundle.graph.degree(*bundle.graph.find("c")) == 0);
}

TEST_CASE("load: empty edge source with one attributed node") {
    std::istringstream edges("");
    std::istringstream attrs("solo\ttok\t0.5\n");
    auto bundle = load_graph(edges, &attrs);
    CHECK(bundle.graph.node_count() == 1);
    CHECK(bundle.graph.edge_count() == 0);
}

TEST_CASE("load: errors carry line numbers") {
    {
        std::istringstream edges("0\n");
        CHECK_THROWS_AS(load_graph(edges, nullptr), ParseError);
    }
    {
        std::istringstream edges("0\t1\n");
        std::istringstream attrs("0\ttok\t1,2\n1\ttok\t1\n");
        CHECK_THROWS_AS(load_graph(edges, &attrs), SchemaError);
    }
    {
        std::istringstream edges("0\t1\n");
        std::istringstream attrs("0\ttok\tnot_a_number\n");
        CHECK_THROWS_AS(load_graph(edges, &attrs), ParseError);
    }
}

TEST_CASE("normalize: min-max with degenerate and missing values") {
    auto g = make_graph(3, {{0, 1}, {1, 2}}, {{2.0, 5.0}, {4.0, 5.0}, {6.0, 5.0}});
    CHECK(g.normalize(2.0, 0) == 0.0);
    CHECK(g.normalize(6.0, 0) == 1.0);
    CHECK(g.normalize(4.0, 0) == 0.5);
    CHECK(g.normalize(5.0, 1) == 0.0);  // constant dimension
    CHECK(std::isnan(g.normalize(kMissing, 0)));
}

TEST_CASE("core decomposition: known shapes") {
    SECTION("triangle") {
        auto g = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
        const auto core = core_decomposition(g);
        for (int c : core) CHECK(c == 2);
    }
    SECTION("star S5") {
        auto g = make_graph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
        const auto core = core_decomposition(g);
        for (int c : core) CHECK(c == 1);
    }
    SECTION("sample graph") {
        auto bundle = load_toy();
        const auto& g = bundle.graph;
        const auto core = core_decomposition(g);
        CHECK(core[*g.find("v12")] == 1);
        for (const char* id : {"v2", "v3", "v4", "v5", "v7", "v8", "v9", "v10"})
            CHECK(core[*g.find(id)] == 3);
        for (const char* id : {"v1", "v6", "v11"}) CHECK(core[*g.find(id)] == 2);
    }
}

TEST_CASE("maximal connected k-core: sample graph") {
    auto bundle = load_toy();
    const auto& g = bundle.graph;
    const NodeId q = *g.find("v5");
    SECTION("k=3 keeps the dense quad around the query") {
        auto s = maximal_connected_kcore(g, q, 3);
        std::vector<std::string> ids;
        for (NodeId v : s.members()) ids.push_back(g.ext_id(v));
        std::sort(ids.begin(), ids.end());
        CHECK(ids == std::vector<std::string>{"v2", "v3", "v4", "v5"});
    }
    SECTION("k=2 keeps the whole first group") {
        auto s = maximal_connected_kcore(g, q, 2);
        CHECK(s.size() == 6);
        CHECK(s.contains(*g.find("v1")));
        CHECK(s.contains(*g.find("v6")));
        CHECK_FALSE(s.contains(*g.find("v7")));
    }
    SECTION("query with degree below k yields empty") {
        auto s = maximal_connected_kcore(g, *g.find("v12"), 2);
        CHECK(s.empty());
    }
}

TEST_CASE("maximal connected k-core equals naive peeling on random graphs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto g = random_attributed_graph(10, 0.5, 1000 + seed);
        for (NodeId q = 0; q < 10; q += 3) {
            auto s = maximal_connected_kcore(g, q, 2);
            auto expect = naive_connected_kcore(g, q, 2);
            CHECK(s.members() == expect);
        }
    }
}

TEST_CASE("maximal connected k-truss: known shapes") {
    SECTION("K4 at k=4 is itself") {
        auto g = make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
        auto s = maximal_connected_ktruss(g, 0, 4);
        CHECK(s.size() == 4);
        CHECK(s.valid_community(0));
    }
    SECTION("trees have no 3-truss") {
        auto g = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
        auto s = maximal_connected_ktruss(g, 2, 3);
        CHECK(s.empty());
    }
}

TEST_CASE("maximal connected k-truss equals naive edge peeling on random graphs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto g = random_attributed_graph(12, 0.5, 2000 + seed);
        for (NodeId q = 0; q < 12; q += 4) {
            auto s = maximal_connected_ktruss(g, q, 3);
            auto expect = naive_connected_ktruss(g, q, 3);
            CHECK(s.members() == expect);
        }
    }
}

TEST_CASE("induced subgraph") {
    auto bundle = load_toy();
    const auto& g = bundle.graph;
    SECTION("full node set keeps every edge") {
        std::vector<NodeId> all;
        for (NodeId v = 0; v < g.node_count(); ++v) all.push_back(v);
        auto s = induced_subgraph(g, all);
        CHECK(s.alive_edge_count() == g.edge_count());
    }
    SECTION("disjoint pair has no edges") {
        auto s = induced_subgraph(g, {*g.find("v1"), *g.find("v7")});
        CHECK(s.alive_edge_count() == 0);
        CHECK(s.size() == 2);
    }
    SECTION("first-group nodes exclude the far side") {
        std::vector<NodeId> grp;
        for (const char* id : {"v1", "v2", "v3", "v4", "v5", "v6"}) grp.push_back(*g.find(id));
        auto s = induced_subgraph(g, grp);
        CHECK(s.alive_edge_count() == 10);
    }
}

TEST_CASE("delete_and_maintain: contract and cascade bookkeeping") {
    auto bundle = load_toy();
    const auto& g = bundle.graph;
    const NodeId q = *g.find("v5");
    DistanceEvaluator dist(g, {0.0, q});
    auto s = maximal_connected_kcore(g, q, 2);

    SECTION("deleting the query or a non-member is a contract violation") {
        CHECK_THROWS_AS(s.delete_and_maintain(q, q, dist), std::invalid_argument);
        CHECK_THROWS_AS(s.delete_and_maintain(*g.find("v7"), q, dist), std::invalid_argument);
    }
    SECTION("no-cascade deletion reports the deleted node itself") {
        const NodeId v1 = *g.find("v1");
        auto res = s.delete_and_maintain(v1, q, dist);
        CHECK(res.survived);
        CHECK(res.v_m == v1);
        CHECK(res.removed == 1);
        CHECK(s.size() == 5);
        CHECK_FALSE(s.contains(v1));
    }
    SECTION("cascade pulls in dependents and undo restores exactly") {
        const auto before = s.members();
        const auto token = s.mark();
        // deleting v3 strands v6 (its only remaining support is v5)
        auto res = s.delete_and_maintain(*g.find("v3"), q, dist);
        CHECK(res.survived);
        CHECK(res.removed == 2);
        CHECK_FALSE(s.contains(*g.find("v6")));
        s.undo(token);
        CHECK(s.members() == before);
        CHECK(s.valid_community(q));
    }
}

TEST_CASE("maximal connected k-truss: sample graph peels the loose fringe") {
    auto bundle = load_toy();
    const auto& g = bundle.graph;
    const NodeId q = *g.find("v5");
    auto t3 = maximal_connected_ktruss(g, q, 3);
    CHECK(t3.size() == 6);  // every first-group edge closes a triangle
    auto t4 = maximal_connected_ktruss(g, q, 4);
    std::vector<std::string> ids;
    for (NodeId v : t4.members()) ids.push_back(g.ext_id(v));
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<std::string>{"v2", "v3", "v4", "v5"});
}

TEST_CASE("cascade consistency: every single deletion matches recomputation") {
    // at each state along a walk, try deleting every non-query member and
    // compare the maintained result against a from-scratch recomputation
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto model = (seed % 2 == 0) ? Model::kCore : Model::kTruss;
        const int k = model == Model::kCore ? 2 : 3;
        auto g = random_attributed_graph(11, 0.5, 90000 + seed);
        const NodeId q = static_cast<NodeId>(seed % 11);
        DistanceEvaluator dist(g, {0.0, q});
        auto s = model == Model::kCore ? maximal_connected_kcore(g, q, k)
                                       : maximal_connected_ktruss(g, q, k);
        std::mt19937_64 rng(seed);
        while (s.contains(q) && s.size() > 2) {
            const auto mem = s.members();
            for (NodeId victim : mem) {
                if (victim == q) continue;
                const auto token = s.mark();
                const auto res = s.delete_and_maintain(victim, q, dist);
                auto alive = mem;
                alive.erase(std::remove(alive.begin(), alive.end(), victim), alive.end());
                const auto expect = testutil::naive_structure(g, q, k, model, &alive);
                if (res.survived)
                    CHECK(s.members() == expect);
                else
                    CHECK(expect.empty());
                s.undo(token);
                REQUIRE(s.members() == mem);
            }
            // descend one random step
            std::vector<NodeId> pool;
            for (NodeId v : mem)
                if (v != q) pool.push_back(v);
            if (pool.empty()) break;
            if (!s.delete_and_maintain(pool[rng() % pool.size()], q, dist).survived) break;
        }
    }
}

TEST_CASE("load: edge file alone works, attributes default to empty") {
    std::istringstream edges("x\ty\ny\tz\nz\tx\n");
    auto bundle = load_graph(edges, nullptr);
    const auto& g = bundle.graph;
    CHECK(g.node_count() == 3);
    CHECK(g.numeric_dims() == 0);
    // all-empty token sets and no numeric schema: every pair at distance 0
    CHECK(composite_distance(g, 0, 1, 0.5) == 0.0);
}

TEST_CASE("cascade consistency: stepwise maintenance equals recomputation") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const auto model = (trial % 2 == 0) ? Model::kCore : Model::kTruss;
        const int k = model == Model::kCore ? 2 : 3;
        const std::size_t n = (trial % 3 == 0) ? 15 : 12;
        auto g = random_attributed_graph(n, 0.45, 4000 + trial);
        const NodeId q = static_cast<NodeId>(rng() % n);
        DistanceEvaluator dist(g, {0.0, q});
        auto s = model == Model::kCore ? maximal_connected_kcore(g, q, k)
                                       : maximal_connected_ktruss(g, q, k);
        if (!s.contains(q)) continue;
        std::vector<NodeId> deleted;
        while (s.size() > 2) {
            // delete a random non-query member
            auto mem = s.members();
            std::vector<NodeId> pool;
            for (NodeId v : mem)
                if (v != q) pool.push_back(v);
            if (pool.empty()) break;
            const NodeId victim = pool[rng() % pool.size()];
            auto res = s.delete_and_maintain(victim, q, dist);
            // oracle: recompute from scratch on the graph minus everything deleted so far
            auto alive = mem;
            deleted.push_back(victim);
            alive.erase(std::remove(alive.begin(), alive.end(), victim), alive.end());
            auto expect = testutil::naive_structure(g, q, k, model, &alive);
            if (!res.survived) {
                CHECK(expect.empty());
                break;
            }
            CHECK(s.members() == expect);
        }
    }
}

TEST_CASE("k-core monotonicity and idempotence") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto g = random_attributed_graph(14, 0.4, 6000 + seed);
        for (int k = 1; k <= 3; ++k) {
            auto a = maximal_connected_kcore(g, 0, k);
            auto b = maximal_connected_kcore(g, 0, k + 1);
            // (k+1)-core members are a subset of k-core members
            for (NodeId v : b.members()) CHECK(a.contains(v));
            // idempotence: re-extracting from the output changes nothing
            if (!a.empty()) {
                Subgraph again(Model::kCore, k, a.members(), [&](NodeId v) {
                    std::vector<NodeId> out;
                    for (NodeId u : g.neighbors(v))
                        if (a.contains(u)) out.push_back(u);
                    return out;
                });
                again.peel_to_valid(0);
                CHECK(again.members() == a.members());
            }
        }
    }
}

TEST_CASE("structural invariants of outputs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto g = random_attributed_graph(12, 0.5, 8000 + seed);
        auto core = maximal_connected_kcore(g, 0, 3);
        if (!core.empty()) {
            for (NodeId v : core.members()) CHECK(core.induced_degree(v) >= 3);
            CHECK(core.valid_community(0));
        }
        auto truss = maximal_connected_ktruss(g, 0, 3);
        if (!truss.empty()) CHECK(truss.valid_community(0));
    }
}
