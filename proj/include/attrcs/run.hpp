#pragma once

#include <string>

#include "attrcs/distance.hpp"
#include "attrcs/estimator.hpp"
#include "attrcs/exact.hpp"
#include "attrcs/hetero.hpp"
#include "attrcs/record.hpp"

namespace attrcs {

// Exit codes mirrored by the CLI: 0 ok, 2 parse error, 3 infeasible query,
// 4 budget exhausted, 5 bad config.
enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,
    kExitInfeasible = 3,
    kExitBudget = 4,
    kExitConfig = 5,
};

struct RunOutcome {
    json record;
    int exit_code = kExitOk;
};

// Dispatches a validated query against a loaded graph and assembles the
// result record. Throws ConfigError for invalid configs (exit 5 at the CLI).
inline RunOutcome run_query(const AttributedGraph& g, const QueryConfig& cfg) {
    cfg.validate();

    const auto qid = g.find(cfg.q);
    if (!qid) {
        json j;
        j["query"] = cfg.echo();
        j["status"] = "infeasible";
        j["community"] = json::array();
        j["reason"] = "query node not found";
        return {j, kExitInfeasible};
    }

    DistanceEvaluator dist(g, {cfg.gamma, *qid});
    RunOutcome out;
    if (cfg.mode == QueryMode::kExact) {
        const auto res = exact_search(g, *qid, cfg.k, dist, cfg.model, cfg.prune_mask,
                                      Budget{cfg.max_states, cfg.max_seconds}, cfg.bounds);
        out.record = record_from_exact(g, cfg, res);
        out.exit_code = res.stats.budget_exhausted ? kExitBudget
                        : res.found               ? kExitOk
                                                  : kExitInfeasible;
    } else {
        SeaResult res;
        if (cfg.metapath) {
            const MetaPath path = parse_metapath(g, *cfg.metapath);
            if (g.node_type(*qid) != path.target_type())
                throw ConfigError("query node is not of the meta-path target type");
            res = sea_search_hetero(g, *qid, cfg.k, path, dist, cfg.sea_params(), cfg.model,
                                    cfg.bounds);
        } else {
            res = sea_search(g, *qid, cfg.k, dist, cfg.sea_params(), cfg.model, cfg.bounds);
        }
        out.record = record_from_sea(g, cfg, res);
        out.exit_code = res.found ? kExitOk : kExitInfeasible;
    }
    return out;
}

}  // namespace attrcs
