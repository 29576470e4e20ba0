#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "attrcs/estimator.hpp"
#include "attrcs/exact.hpp"
#include "attrcs/graph.hpp"
#include "attrcs/types.hpp"

namespace attrcs {

using json = nlohmann::json;

enum class QueryMode { kExact, kSea };

struct QueryConfig {
    std::string q;  // external node id
    QueryMode mode = QueryMode::kSea;
    Model model = Model::kCore;
    int k = 4;
    double gamma = 0.5;
    double e = 0.02;
    double alpha = 0.05;
    double epsilon = 0.05;
    double beta = 0.05;
    double lambda = 0.2;
    int blb_s = 8;
    int blb_r = 100;
    double blb_m = 0.6;
    int round_cap = 10;
    std::uint64_t seed = 0;
    std::optional<SizeBounds> bounds;
    std::optional<std::string> metapath;
    PruneMask prune_mask;
    std::uint64_t max_states = 0;
    double max_seconds = 0.0;
    bool timings = false;

    void validate() const {
        const auto fail = [](const std::string& m) { throw ConfigError(m); };
        if (q.empty()) fail("query node id is required");
        if (model == Model::kCore && k < 1) fail("k must be >= 1 for the core model");
        if (model == Model::kTruss && k < 2) fail("k must be >= 2 for the truss model");
        if (gamma < 0.0 || gamma > 1.0) fail("gamma must be in [0,1]");
        if (e <= 0.0) fail("e must be positive");
        if (alpha <= 0.0 || alpha >= 1.0) fail("alpha must be in (0,1)");
        if (epsilon <= 0.0) fail("epsilon must be positive");
        if (beta <= 0.0 || beta >= 1.0) fail("beta must be in (0,1)");
        if (lambda <= 0.0 || lambda > 1.0) fail("lambda must be in (0,1]");
        if (blb_m < 0.5 || blb_m >= 1.0) fail("m must be in [0.5,1)");
        if (blb_s < 1) fail("s must be >= 1");
        if (blb_r < 2) fail("r must be >= 2");
        if (round_cap < 1) fail("round cap must be >= 1");
        if (bounds) validate_bounds(*bounds, model, k);
        if (metapath && mode == QueryMode::kExact)
            fail("meta-path queries run in sea mode");
    }

    SeaParams sea_params() const {
        SeaParams p;
        p.e = e;
        p.alpha = alpha;
        p.epsilon = epsilon;
        p.beta = beta;
        p.lambda = lambda;
        p.blb_s = blb_s;
        p.blb_m = blb_m;
        p.blb_r = blb_r;
        p.round_cap = round_cap;
        p.seed = seed;
        return p;
    }

    json echo() const {
        json j{{"q", q},
               {"mode", mode == QueryMode::kExact ? "exact" : "sea"},
               {"model", model_name(model)},
               {"k", k},
               {"gamma", gamma},
               {"e", e},
               {"alpha", alpha},
               {"epsilon", epsilon},
               {"beta", beta},
               {"lambda", lambda},
               {"s", blb_s},
               {"r", blb_r},
               {"m", blb_m},
               {"round_cap", round_cap},
               {"seed", seed}};
        if (bounds) j["size_bound"] = json::array({bounds->lo, bounds->hi});
        if (metapath) j["metapath"] = *metapath;
        if (mode == QueryMode::kExact) {
            json mask = json::array();
            if (prune_mask.p1) mask.push_back("P1");
            if (prune_mask.p2) mask.push_back("P2");
            if (prune_mask.p3) mask.push_back("P3");
            j["prune_mask"] = mask;
        }
        return j;
    }
};

inline json sorted_ext_ids(const AttributedGraph& g, const std::vector<NodeId>& members) {
    std::vector<std::string> ids;
    ids.reserve(members.size());
    for (NodeId v : members) ids.push_back(g.ext_id(v));
    std::sort(ids.begin(), ids.end());
    return json(ids);
}

inline json record_from_exact(const AttributedGraph& g, const QueryConfig& cfg,
                              const ExactResult& res) {
    json j;
    j["query"] = cfg.echo();
    j["status"] = res.stats.budget_exhausted ? "budget_exhausted" : (res.found ? "ok" : "infeasible");
    if (res.found) {
        j["community"] = sorted_ext_ids(g, res.members);
        j["delta"] = res.delta_star;
    } else {
        j["community"] = json::array();
        j["reason"] = res.reason;
    }
    j["enum_stats"] = {{"explored", res.stats.explored},
                       {"pruned_p1", res.stats.pruned_p1},
                       {"pruned_p2", res.stats.pruned_p2},
                       {"pruned_p3", res.stats.pruned_p3},
                       {"collapsed", res.stats.collapsed}};
    if (cfg.timings) j["timings"] = {{"total_ms", res.stats.elapsed_ms}};
    return j;
}

inline json record_from_sea(const AttributedGraph& g, const QueryConfig& cfg,
                            const SeaResult& res) {
    json j;
    j["query"] = cfg.echo();
    j["status"] = res.found ? "ok" : "infeasible";
    if (res.found) {
        j["community"] = sorted_ext_ids(g, res.community);
        j["delta"] = res.ci.point;
        j["ci"] = {{"point", res.ci.point}, {"moe", res.ci.moe}, {"level", res.ci.level}};
        j["guarantee_met"] = res.guarantee_met;
    } else {
        j["community"] = json::array();
        j["reason"] = res.reason;
    }
    json rounds = json::array();
    for (const auto& r : res.rounds) {
        json rj{{"round", r.round},
                {"gq_size", r.gq_size},
                {"sample_size", r.sample_size},
                {"delta_s", r.delta_s},
                {"candidates", r.candidates}};
        if (!std::isnan(r.best_delta)) {
            rj["best_delta"] = r.best_delta;
            rj["best_moe"] = r.best_moe;
        }
        if (cfg.timings) rj["elapsed_ms"] = r.elapsed_ms;
        rounds.push_back(rj);
    }
    j["rounds"] = rounds;
    if (!res.note.empty()) j["note"] = res.note;
    if (cfg.timings)
        j["timings"] = {{"sampling_ms", res.s1_ms},
                        {"estimation_ms", res.s2_ms},
                        {"growth_ms", res.s3_ms}};
    return j;
}

// The shipped result-record schema (schemas/result_record.schema.json keeps
// the same text for external tooling).
inline const char* result_record_schema_text() {
    return R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "attrcs result record",
  "type": "object",
  "required": ["query", "status", "community"],
  "properties": {
    "query": {
      "type": "object",
      "required": ["q", "mode", "model", "k", "gamma", "seed"],
      "properties": {
        "q": {"type": "string"},
        "mode": {"enum": ["exact", "sea"]},
        "model": {"enum": ["core", "truss"]},
        "k": {"type": "integer"},
        "gamma": {"type": "number"},
        "e": {"type": "number"},
        "alpha": {"type": "number"},
        "epsilon": {"type": "number"},
        "beta": {"type": "number"},
        "lambda": {"type": "number"},
        "seed": {"type": "integer"}
      }
    },
    "status": {"enum": ["ok", "infeasible", "budget_exhausted"]},
    "community": {"type": "array", "items": {"type": "string"}},
    "delta": {"type": "number"},
    "ci": {
      "type": "object",
      "required": ["point", "moe", "level"],
      "properties": {
        "point": {"type": "number"},
        "moe": {"type": "number"},
        "level": {"type": "number"}
      }
    },
    "guarantee_met": {"type": "boolean"},
    "reason": {"type": "string"},
    "note": {"type": "string"},
    "rounds": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["round", "gq_size", "sample_size", "delta_s", "candidates"],
        "properties": {
          "round": {"type": "integer"},
          "gq_size": {"type": "integer"},
          "sample_size": {"type": "integer"},
          "delta_s": {"type": "integer"},
          "candidates": {"type": "integer"},
          "best_delta": {"type": "number"},
          "best_moe": {"type": "number"},
          "elapsed_ms": {"type": "number"}
        }
      }
    },
    "enum_stats": {
      "type": "object",
      "required": ["explored", "pruned_p1", "pruned_p2", "pruned_p3"],
      "properties": {
        "explored": {"type": "integer"},
        "pruned_p1": {"type": "integer"},
        "pruned_p2": {"type": "integer"},
        "pruned_p3": {"type": "integer"},
        "collapsed": {"type": "integer"}
      }
    },
    "timings": {"type": "object"}
  }
})json";
}

// Minimal structural validator for the schema subset used above: type,
// required, properties, items, enum.
inline void validate_against_schema(const json& value, const json& schema,
                                    std::vector<std::string>& errors,
                                    const std::string& path = "$") {
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& cand : schema["enum"])
            if (cand == value) {
                ok = true;
                break;
            }
        if (!ok) errors.push_back(path + ": value not in enum");
        return;
    }
    if (schema.contains("type")) {
        const std::string t = schema["type"].get<std::string>();
        const bool ok = (t == "object" && value.is_object()) ||
                        (t == "array" && value.is_array()) ||
                        (t == "string" && value.is_string()) ||
                        (t == "number" && value.is_number()) ||
                        (t == "integer" && value.is_number_integer()) ||
                        (t == "boolean" && value.is_boolean());
        if (!ok) {
            errors.push_back(path + ": expected " + t);
            return;
        }
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>()))
                    errors.push_back(path + ": missing required key " + key.get<std::string>());
        if (schema.contains("properties"))
            for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it)
                if (value.contains(it.key()))
                    validate_against_schema(value[it.key()], it.value(), errors,
                                            path + "." + it.key());
    } else if (value.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < value.size(); ++i)
            validate_against_schema(value[i], schema["items"], errors,
                                    path + "[" + std::to_string(i) + "]");
    }
}

inline bool record_is_valid(const json& record, std::vector<std::string>* why = nullptr) {
    std::vector<std::string> errors;
    validate_against_schema(record, json::parse(result_record_schema_text()), errors);
    if (why) *why = errors;
    return errors.empty();
}

}  // namespace attrcs
