// attrcs: community search over attributed graphs.
//   attrcs query: one query, JSON result record
//   attrcs bench: query batches over a config grid, CSV report
//   attrcs gen:   synthetic planted-community fixtures

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "attrcs/gen.hpp"
#include "attrcs/oracle.hpp"
#include "attrcs/run.hpp"

using namespace attrcs;

namespace {

GraphBundle load_files(const std::string& edges, const std::string& attrs,
                       const std::string& types) {
    std::ifstream es(edges);
    if (!es) throw ParseError(0, "cannot open edge file: " + edges);
    std::optional<std::ifstream> as;
    if (!attrs.empty()) {
        as.emplace(attrs);
        if (!*as) throw ParseError(0, "cannot open attribute file: " + attrs);
    }
    std::optional<std::ifstream> ts;
    if (!types.empty()) {
        ts.emplace(types);
        if (!*ts) throw ParseError(0, "cannot open type file: " + types);
    }
    return load_graph(es, as ? &*as : nullptr, ts ? &*ts : nullptr);
}

bool parse_size_bound(const std::string& text, SizeBounds& out) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return false;
    try {
        out.lo = std::stoul(text.substr(0, comma));
        out.hi = std::stoul(text.substr(comma + 1));
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

bool parse_prune_mask(const std::string& text, PruneMask& out) {
    out = {false, false, false};
    for (const auto& part : detail::split(text, ',')) {
        if (part == "P1") out.p1 = true;
        else if (part == "P2") out.p2 = true;
        else if (part == "P3") out.p3 = true;
        else if (!part.empty()) return false;
    }
    return true;
}

int worker_count() {
    if (const char* env = std::getenv("ATTRCS_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

void emit_record(const json& record, const std::string& out_path) {
    std::vector<std::string> why;
    if (!record_is_valid(record, &why)) {
        std::cerr << "internal error: record fails schema validation\n";
        for (const auto& w : why) std::cerr << "  " << w << "\n";
        std::exit(1);
    }
    if (out_path.empty()) {
        std::cout << record.dump(2) << "\n";
    } else {
        std::ofstream os(out_path);
        os << record.dump(2) << "\n";
    }
}

PlantedConfig planted_from_json(const json& j) {
    PlantedConfig cfg;
    cfg.n = j.value("n", cfg.n);
    cfg.clique = j.value("clique", cfg.clique);
    cfg.decoys = j.value("decoys", cfg.decoys);
    cfg.k = j.value("k", cfg.k);
    cfg.avg_degree = j.value("avg_degree", cfg.avg_degree);
    cfg.delta_base = j.value("delta_base", cfg.delta_base);
    cfg.delta_jitter = j.value("delta_jitter", cfg.delta_jitter);
    cfg.decoy_lo = j.value("decoy_lo", cfg.decoy_lo);
    cfg.decoy_hi = j.value("decoy_hi", cfg.decoy_hi);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

QueryConfig config_from_json(const json& j, QueryConfig base = {}) {
    QueryConfig c = base;
    if (j.contains("q")) c.q = j["q"].get<std::string>();
    if (j.contains("mode")) c.mode = j["mode"] == "exact" ? QueryMode::kExact : QueryMode::kSea;
    if (j.contains("model")) c.model = j["model"] == "truss" ? Model::kTruss : Model::kCore;
    c.k = j.value("k", c.k);
    c.gamma = j.value("gamma", c.gamma);
    c.e = j.value("e", c.e);
    c.alpha = j.value("alpha", c.alpha);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.beta = j.value("beta", c.beta);
    c.lambda = j.value("lambda", c.lambda);
    c.blb_s = j.value("s", c.blb_s);
    c.blb_r = j.value("r", c.blb_r);
    c.blb_m = j.value("m", c.blb_m);
    c.round_cap = j.value("round_cap", c.round_cap);
    c.seed = j.value("seed", c.seed);
    c.max_states = j.value("max_states", c.max_states);
    c.max_seconds = j.value("max_seconds", c.max_seconds);
    if (j.contains("size_bound")) {
        SizeBounds b{j["size_bound"][0].get<std::size_t>(), j["size_bound"][1].get<std::size_t>()};
        c.bounds = b;
    }
    if (j.contains("metapath")) c.metapath = j["metapath"].get<std::string>();
    if (j.contains("prune_mask")) {
        PruneMask m{false, false, false};
        for (const auto& p : j["prune_mask"]) {
            if (p == "P1") m.p1 = true;
            if (p == "P2") m.p2 = true;
            if (p == "P3") m.p3 = true;
        }
        c.prune_mask = m;
    }
    return c;
}

struct BenchRow {
    std::string param;
    std::string value;
    std::size_t queries = 0, ok = 0, infeasible = 0, guarantee = 0, oracle_count = 0;
    double sum_delta = 0, sum_rel_err = 0, sum_wall = 0, sum_s1 = 0, sum_s2 = 0, sum_s3 = 0;
    double sum_explored = 0, sum_p1 = 0, sum_p2 = 0, sum_p3 = 0;
};

int run_bench(const std::string& config_path) {
    std::ifstream cs(config_path);
    if (!cs) {
        std::cerr << "cannot open bench config: " << config_path << "\n";
        return kExitConfig;
    }
    json cfg = json::parse(cs, nullptr, true, true);

    std::optional<AttributedGraph> graph;
    std::string gen_note;
    if (cfg.contains("graph") && cfg["graph"].contains("gen")) {
        const auto pc = planted_from_json(cfg["graph"]["gen"]);
        graph = make_planted(pc).graph;
        gen_note = "# fixture: attrcs gen --config <this file's graph.gen block>";
    } else if (cfg.contains("graph")) {
        auto bundle = load_files(cfg["graph"].value("edges", ""), cfg["graph"].value("attrs", ""),
                                 cfg["graph"].value("types", ""));
        graph = std::move(bundle.graph);
    } else {
        std::cerr << "bench config needs a graph section\n";
        return kExitConfig;
    }

    QueryConfig base = config_from_json(cfg.value("base", json::object()));

    // query list: explicit ids, or a seeded random draw of non-isolated nodes
    std::vector<std::string> query_ids;
    if (cfg.contains("queries") && cfg["queries"].is_array()) {
        for (const auto& qj : cfg["queries"]) query_ids.push_back(qj.get<std::string>());
    } else if (cfg.contains("queries")) {
        const auto count = cfg["queries"].value("count", 0u);
        Rng rng(derive_seed(cfg["queries"].value("seed", 0ull), 0xbecull));
        std::vector<NodeId> pool;
        for (NodeId v = 0; v < graph->node_count(); ++v)
            if (graph->degree(v) >= static_cast<std::size_t>(base.k)) pool.push_back(v);
        for (std::size_t i = 0; i < count && !pool.empty(); ++i)
            query_ids.push_back(graph->ext_id(pool[rng.below(pool.size())]));
    }

    struct SweepPoint {
        std::string param, label;
        json value;
    };
    std::vector<SweepPoint> points;
    if (cfg.contains("sweep")) {
        const std::string param = cfg["sweep"]["param"].get<std::string>();
        for (const auto& v : cfg["sweep"]["values"]) {
            std::string label = v.dump();
            for (auto& ch : label)
                if (ch == ',') ch = '+';
            label.erase(std::remove(label.begin(), label.end(), '"'), label.end());
            points.push_back({param, label, v});
        }
    } else {
        points.push_back({"none", "-", json()});
    }

    const bool timings = cfg.value("timings", true);
    const int workers = worker_count();

    std::ofstream csv(cfg.value("out_csv", std::string("bench.csv")));
    if (!gen_note.empty()) csv << gen_note << "\n";
    csv << "param,value,queries,ok,infeasible,guarantee_rate,mean_delta,mean_rel_err,"
           "oracle_count,mean_wall_ms,mean_s1_ms,mean_s2_ms,mean_s3_ms,mean_explored,"
           "mean_p1,mean_p2,mean_p3\n";

    std::optional<std::ofstream> jsonl;
    if (cfg.contains("out_jsonl")) jsonl.emplace(cfg["out_jsonl"].get<std::string>());

    for (const auto& pt : points) {
        BenchRow row;
        row.param = pt.param;
        row.value = pt.label;
        std::vector<json> records(query_ids.size());
        std::vector<double> walls(query_ids.size(), 0.0);

        std::atomic<std::size_t> next{0};
        const auto work = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= query_ids.size()) return;
                QueryConfig qc = base;
                qc.q = query_ids[i];
                qc.timings = timings;
                qc.seed = derive_seed(base.seed, 0x9121ull, i);
                if (pt.param != "none") {
                    json patch;
                    patch[pt.param] = pt.value;
                    qc = config_from_json(patch, qc);
                }
                const auto t0 = std::chrono::steady_clock::now();
                json rec;
                try {
                    rec = run_query(*graph, qc).record;
                } catch (const std::exception& ex) {
                    rec = json{{"status", "error"}, {"reason", ex.what()},
                               {"query", qc.echo()}, {"community", json::array()}};
                }
                walls[i] =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                        .count();
                records[i] = std::move(rec);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();

        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& rec = records[i];
            ++row.queries;
            row.sum_wall += walls[i];
            if (jsonl) *jsonl << rec.dump() << "\n";
            if (rec["status"] == "infeasible" || rec["status"] == "error") {
                ++row.infeasible;
                continue;
            }
            ++row.ok;
            if (rec.contains("delta")) row.sum_delta += rec["delta"].get<double>();
            if (rec.value("guarantee_met", false)) ++row.guarantee;
            if (rec.contains("timings")) {
                row.sum_s1 += rec["timings"].value("sampling_ms", 0.0);
                row.sum_s2 += rec["timings"].value("estimation_ms", 0.0);
                row.sum_s3 += rec["timings"].value("growth_ms", 0.0);
            }
            if (rec.contains("enum_stats")) {
                row.sum_explored += rec["enum_stats"]["explored"].get<double>();
                row.sum_p1 += rec["enum_stats"]["pruned_p1"].get<double>();
                row.sum_p2 += rec["enum_stats"]["pruned_p2"].get<double>();
                row.sum_p3 += rec["enum_stats"]["pruned_p3"].get<double>();
            }
            // oracle-measured relative error where the component is tiny
            if (rec.contains("delta")) {
                const auto qid = graph->find(query_ids[i]);
                try {
                    QueryConfig qc = base;
                    if (pt.param != "none") {
                        json patch;
                        patch[pt.param] = pt.value;
                        qc = config_from_json(patch, qc);
                    }
                    DistanceEvaluator dist(*graph, {qc.gamma, *qid});
                    const auto oracle =
                        brute_force_optimum(*graph, *qid, qc.k, qc.model, dist, qc.bounds);
                    if (oracle.found && oracle.delta_star > 0) {
                        ++row.oracle_count;
                        row.sum_rel_err += std::fabs(rec["delta"].get<double>() -
                                                     oracle.delta_star) /
                                           oracle.delta_star;
                    }
                } catch (const std::length_error&) {
                    // component too large for the oracle guard; skip
                }
            }
        }

        const auto mean = [&](double sum, std::size_t n) { return n ? sum / n : 0.0; };
        csv << row.param << ',' << row.value << ',' << row.queries << ',' << row.ok << ','
            << row.infeasible << ',' << mean(row.guarantee, row.ok) << ','
            << mean(row.sum_delta, row.ok) << ',' << mean(row.sum_rel_err, row.oracle_count) << ','
            << row.oracle_count << ',' << mean(row.sum_wall, row.queries) << ','
            << mean(row.sum_s1, row.ok) << ',' << mean(row.sum_s2, row.ok) << ','
            << mean(row.sum_s3, row.ok) << ',' << mean(row.sum_explored, row.ok) << ','
            << mean(row.sum_p1, row.ok) << ',' << mean(row.sum_p2, row.ok) << ','
            << mean(row.sum_p3, row.ok) << "\n";
    }
    return kExitOk;
}

int run_gen(const std::string& config_path) {
    std::ifstream cs(config_path);
    if (!cs) {
        std::cerr << "cannot open gen config: " << config_path << "\n";
        return kExitConfig;
    }
    json cfg = json::parse(cs, nullptr, true, true);
    const auto pc = planted_from_json(cfg);
    const std::string out_edges = cfg.value("out_edges", std::string("edges.tsv"));
    const std::string out_attrs = cfg.value("out_attrs", std::string("attrs.tsv"));
    std::ofstream es(out_edges), as(out_attrs);
    if (!es || !as) {
        std::cerr << "cannot open output files\n";
        return kExitConfig;
    }
    write_fixture_files(pc, es, as);
    std::cerr << "wrote " << out_edges << " and " << out_attrs << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"community search over attributed graphs"};
    app.require_subcommand(1);

    // --- query ---
    auto* q = app.add_subcommand("query", "run one community-search query");
    std::string edges, attrs, types, qid, mode = "sea", model = "core", out_path;
    std::string size_bound, metapath, prune_mask_text;
    QueryConfig qc;
    q->add_option("--edges", edges, "edge file")->required();
    q->add_option("--attrs", attrs, "attribute file");
    q->add_option("--types", types, "node type file");
    q->add_option("--q", qid, "query node id")->required();
    q->add_option("--k", qc.k, "structural parameter k");
    q->add_option("--mode", mode, "exact|sea");
    q->add_option("--model", model, "core|truss");
    q->add_option("--gamma", qc.gamma, "textual/numerical balance");
    q->add_option("--e", qc.e, "relative error bound");
    q->add_option("--alpha", qc.alpha, "1-alpha = CI confidence level");
    q->add_option("--epsilon", qc.epsilon, "Hoeffding estimation error");
    q->add_option("--beta", qc.beta, "1-beta = containment probability");
    q->add_option("--lambda", qc.lambda, "initial sampling fraction");
    q->add_option("--s", qc.blb_s, "BLB subsample count");
    q->add_option("--r", qc.blb_r, "bootstrap resamples");
    q->add_option("--m", qc.blb_m, "BLB scale exponent");
    q->add_option("--round-cap", qc.round_cap, "max sampling rounds");
    q->add_option("--seed", qc.seed, "random seed");
    q->add_option("--size-bound", size_bound, "l,h community size bounds");
    q->add_option("--metapath", metapath, "meta-path, e.g. A-P-A");
    q->add_option("--prune-mask", prune_mask_text, "subset of P1,P2,P3 (exact mode)");
    q->add_option("--max-states", qc.max_states, "exact-mode state budget");
    q->add_option("--max-seconds", qc.max_seconds, "exact-mode time budget");
    q->add_flag("--timings", qc.timings, "include wall-clock timings in the record");
    q->add_option("--out", out_path, "output file (default stdout)");

    // --- bench / gen ---
    auto* b = app.add_subcommand("bench", "run a benchmark config");
    std::string bench_config;
    b->add_option("--config", bench_config, "bench config JSON")->required();
    auto* gencmd = app.add_subcommand("gen", "generate a synthetic fixture");
    std::string gen_config;
    gencmd->add_option("--config", gen_config, "generator config JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (q->parsed()) {
            qc.q = qid;
            qc.mode = mode == "exact" ? QueryMode::kExact : QueryMode::kSea;
            if (mode != "exact" && mode != "sea") throw ConfigError("mode must be exact or sea");
            if (model == "truss") qc.model = Model::kTruss;
            else if (model != "core") throw ConfigError("model must be core or truss");
            if (!size_bound.empty()) {
                SizeBounds sb;
                if (!parse_size_bound(size_bound, sb))
                    throw ConfigError("size bound must be 'l,h'");
                qc.bounds = sb;
            }
            if (!metapath.empty()) qc.metapath = metapath;
            if (!prune_mask_text.empty()) {
                PruneMask pm;
                if (!parse_prune_mask(prune_mask_text, pm))
                    throw ConfigError("prune mask must list P1,P2,P3");
                qc.prune_mask = pm;
            }
            qc.validate();
            auto bundle = load_files(edges, attrs, types);
            const auto& warns = bundle.stats.warnings;
            for (std::size_t i = 0; i < warns.size() && i < 5; ++i)
                std::cerr << "warning: " << warns[i] << "\n";
            if (warns.size() > 5)
                std::cerr << "warning: ... and " << warns.size() - 5 << " more\n";
            const auto outcome = run_query(bundle.graph, qc);
            emit_record(outcome.record, out_path);
            return outcome.exit_code;
        }
        if (b->parsed()) return run_bench(bench_config);
        if (gencmd->parsed()) return run_gen(gen_config);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& ex) {
        std::cerr << "parse error: " << ex.what() << "\n";
        return kExitParse;
    } catch (const json::exception& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
