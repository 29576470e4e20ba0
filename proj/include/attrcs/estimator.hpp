#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "attrcs/distance.hpp"
#include "attrcs/rng.hpp"
#include "attrcs/sampler.hpp"
#include "attrcs/subgraph.hpp"
#include "attrcs/types.hpp"

namespace attrcs {

// Inverse standard normal CDF (Acklam's rational approximation) with one
// Halley refinement through erfc; absolute error well below 1e-9.
inline double inverse_normal_cdf(double p) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("probability must be in (0,1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double t = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
            ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double t = p - 0.5;
        const double r = t * t;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double t = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
            ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    }
    // Halley step against the exact CDF
    constexpr double sqrt_2pi = 2.506628274631000502;
    const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
    const double err = cdf - p;
    const double u = err * sqrt_2pi * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

// Normal critical value with right-tail probability alpha/2.
inline double z_critical(double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("alpha must be in (0,1)");
    return -inverse_normal_cdf(alpha / 2.0);
}

struct BlbParams {
    int s = 8;            // subsample count
    double m_scale = 0.6; // subsample size exponent, in [0.5, 1)
    int r = 100;          // bootstrap resamples per subsample
    double alpha = 0.05;  // 1 - alpha = confidence level
};

struct ConfidenceInterval {
    double point = 0.0;
    double moe = 0.0;
    double level = 0.0;
};

inline bool accuracy_met(const ConfidenceInterval& ci, double e) {
    if (e <= 0.0) throw std::invalid_argument("error bound must be positive");
    return ci.moe <= ci.point * e / (1.0 + e);
}

// Standard deviation of bootstrap resample means: r resamples of
// `resample_size` values drawn with replacement from the subsample. The
// printed estimator dispersion formula is taken as the sample standard
// deviation so the result carries the units of the mean.
template <class Dist>
double bootstrap_sigma(const std::vector<NodeId>& subsample, std::size_t resample_size, int r,
                       Dist&& dist, Rng& rng) {
    if (subsample.empty() || r < 2) throw std::invalid_argument("bootstrap needs data and r >= 2");
    std::vector<double> vals(subsample.size());
    for (std::size_t i = 0; i < subsample.size(); ++i) vals[i] = dist(subsample[i]);
    std::vector<double> means(static_cast<std::size_t>(r));
    for (auto& m : means) {
        double sum = 0.0;
        for (std::size_t j = 0; j < resample_size; ++j)
            sum += vals[rng.below(vals.size())];
        m = sum / static_cast<double>(resample_size);
    }
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= static_cast<double>(r);
    double ss = 0.0;
    for (double m : means) ss += (m - mu) * (m - mu);
    return std::sqrt(ss / static_cast<double>(r - 1));
}

template <class Dist>
double bootstrap_sigma(const std::vector<NodeId>& subsample, int r, Dist&& dist, Rng& rng) {
    return bootstrap_sigma(subsample, subsample.size(), r, std::forward<Dist>(dist), rng);
}

struct BlbOutcome {
    ConfidenceInterval ci;
    std::size_t blb_total = 0;  // |S_blb|, union of the subsamples
};

// Bag of little bootstraps over the community's non-query members: s disjoint
// subsamples of size ceil(N^m) (s shrinks if the partition does not fit),
// each bootstrapped at the community scale N so the averaged margin estimates
// the standard error of the point estimate itself. The point estimate is the
// exact attribute distance of the community; BLB supplies only dispersion.
template <class Dist>
BlbOutcome blb_moe(const std::vector<NodeId>& community, NodeId q, const BlbParams& prm,
                   Dist&& dist, std::uint64_t seed) {
    BlbOutcome out;
    out.ci.level = 1.0 - prm.alpha;
    out.ci.point = community_attribute_distance(community, q, dist);
    std::vector<NodeId> others;
    others.reserve(community.size());
    for (NodeId v : community)
        if (v != q) others.push_back(v);
    const std::size_t n = others.size();
    if (n < 2) {
        out.ci.moe = 0.0;
        out.blb_total = n;
        return out;
    }
    const double z = z_critical(prm.alpha);
    const auto b = static_cast<std::size_t>(
        std::ceil(std::pow(static_cast<double>(n), prm.m_scale)));
    const std::size_t s_eff = std::max<std::size_t>(
        1, std::min<std::size_t>(static_cast<std::size_t>(prm.s), n / b));

    Rng shuffle_rng(derive_seed(seed, 0x5u));
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(shuffle_rng.below(i + 1));
        std::swap(others[i], others[j]);
    }
    double moe_sum = 0.0;
    for (std::size_t i = 0; i < s_eff; ++i) {
        const std::size_t lo = i * b;
        const std::size_t hi = std::min(lo + b, n);
        std::vector<NodeId> sub(others.begin() + lo, others.begin() + hi);
        Rng rng(derive_seed(seed, 0xb0u, i));
        moe_sum += z * bootstrap_sigma(sub, n, prm.r, dist, rng);
    }
    out.ci.moe = moe_sum / static_cast<double>(s_eff);
    out.blb_total = std::min(s_eff * b, n);
    return out;
}

// Deletes the most dissimilar member and re-maintains the structure around q.
// Returns false (leaving the state empty) when the community collapses.
template <class Dist>
bool greedy_next_candidate(Subgraph& state, NodeId q, Dist&& dist) {
    bool have = false;
    NodeId worst = 0;
    double worst_dist = 0.0;
    for (NodeId v : state.members()) {
        if (v == q) continue;
        const double f = dist(v);
        if (!have || f > worst_dist || (f == worst_dist && v < worst)) {
            worst = v;
            worst_dist = f;
            have = true;
        }
    }
    if (!have) return false;
    return state.delete_and_maintain(worst, q, dist).survived;
}

struct SeaParams {
    double e = 0.02;        // relative error bound
    double alpha = 0.05;    // 1 - alpha = CI confidence level
    double epsilon = 0.05;  // Hoeffding estimation error
    double beta = 0.05;     // 1 - beta = neighborhood containment probability
    double lambda = 0.2;    // initial sampling fraction of |G_q|
    int blb_s = 8;
    double blb_m = 0.6;
    int blb_r = 100;
    int round_cap = 10;
    std::uint64_t seed = 0;
};

struct RoundRecord {
    int round = 0;
    std::size_t gq_size = 0;
    std::size_t sample_size = 0;  // |S| used this round
    std::size_t delta_s = 0;      // nodes added entering this round
    int candidates = 0;           // candidates estimated this round
    double best_delta = std::numeric_limits<double>::quiet_NaN();
    double best_moe = std::numeric_limits<double>::quiet_NaN();
    double elapsed_ms = 0.0;
};

struct SeaResult {
    bool found = false;
    bool guarantee_met = false;
    std::vector<NodeId> community;  // sorted
    ConfidenceInterval ci;
    std::vector<RoundRecord> rounds;
    std::string reason;
    std::string note;
    Model model = Model::kCore;
    int k = 0;
    std::optional<SizeBounds> bounds;
    double s1_ms = 0.0, s2_ms = 0.0, s3_ms = 0.0;  // sampling / estimation / growth
};

// The sampling-estimation driver, generic over the adjacency so homogeneous
// graphs and meta-path views run the same code. One pass: build G_q once
// (Hoeffding-sized), then rounds of {induce sample, extract the maximal
// structure, walk greedy candidates with BLB margins} growing the sample by
// the error-based rule until the stopping rule fires, the sample is
// exhausted, or the round cap is hit.
template <class NeighborFn, class Dist>
SeaResult sea_search_impl(std::size_t n_pop, std::size_t n_hint, NodeId q, int k, Model model,
                          NeighborFn&& nbrs, Dist&& dist, const SeaParams& prm,
                          std::optional<SizeBounds> bounds = std::nullopt) {
    using clock = std::chrono::steady_clock;
    const auto ms_since = [](clock::time_point t) {
        return std::chrono::duration<double, std::milli>(clock::now() - t).count();
    };

    SeaResult out;
    out.model = model;
    out.k = k;
    out.bounds = bounds;
    if (bounds) validate_bounds(*bounds, model, k);
    const std::size_t msize = model_minimum_size(model, k);
    const std::size_t min_comm = bounds ? bounds->lo : msize;

    auto t_s1 = clock::now();
    const std::size_t target = min_neighborhood_size(n_pop, min_comm, prm.epsilon, prm.beta);
    auto gq = build_neighborhood(q, target, n_hint, nbrs, dist);
    SampleState sample(std::move(gq), q, dist, prm.seed, prm.lambda);
    std::size_t pending_delta = sample.initial_count();
    sample.draw(pending_delta);
    out.s1_ms += ms_since(t_s1);

    BlbParams blb{prm.blb_s, prm.blb_m, prm.blb_r, prm.alpha};

    bool have_best = false;
    double best_delta = std::numeric_limits<double>::infinity();
    std::vector<NodeId> best_members;
    ConfidenceInterval best_ci;

    for (int round = 1; round <= prm.round_cap; ++round) {
        auto t_s2 = clock::now();
        RoundRecord rec;
        rec.round = round;
        rec.gq_size = sample.neighborhood_size();
        rec.sample_size = sample.sample_size();
        rec.delta_s = pending_delta;

        std::optional<BlbOutcome> round_best;
        Subgraph cand(model, k, sample.sample_members(), nbrs);
        bool walking = cand.peel_to_valid(q);
        int cand_index = 0;
        while (walking) {
            const std::size_t sz = cand.size();
            if (bounds && sz < bounds->lo) break;  // greedy walk only shrinks
            if (!bounds || sz <= bounds->hi) {
                const auto members = cand.members();
                const auto est = blb_moe(members, q, blb, dist,
                                         derive_seed(prm.seed, 0xeaull, round, cand_index));
                ++rec.candidates;
                ++cand_index;
                if (!round_best || est.ci.point < round_best->ci.point) round_best = est;
                if (!have_best || community_better(est.ci.point, members, best_delta, best_members)) {
                    have_best = true;
                    best_delta = est.ci.point;
                    best_members = members;
                    best_ci = est.ci;
                }
                bool stop = false;
                bool met = false;
                if (est.ci.point > 0.0) {
                    met = accuracy_met(est.ci, prm.e);
                    stop = met;
                } else if (est.ci.moe == 0.0) {
                    met = true;
                    stop = true;
                    out.note = "degenerate zero-distance optimum";
                } else if (est.ci.moe <= 1e-9) {
                    // relative error is undefined at delta=0; accept but do
                    // not claim the guarantee
                    stop = true;
                    out.note = "degenerate zero-distance optimum with nonzero margin";
                }
                if (stop) {
                    rec.best_delta = round_best->ci.point;
                    rec.best_moe = round_best->ci.moe;
                    rec.elapsed_ms = ms_since(t_s2);
                    out.s2_ms += rec.elapsed_ms;
                    out.rounds.push_back(rec);
                    out.found = true;
                    out.guarantee_met = met;
                    out.community = members;
                    out.ci = est.ci;
                    return out;
                }
            }
            walking = greedy_next_candidate(cand, q, dist);
        }
        if (round_best) {
            rec.best_delta = round_best->ci.point;
            rec.best_moe = round_best->ci.moe;
        }
        rec.elapsed_ms = ms_since(t_s2);
        out.s2_ms += rec.elapsed_ms;
        out.rounds.push_back(rec);

        if (sample.remaining() == 0 || round == prm.round_cap) break;

        auto t_s3 = clock::now();
        std::size_t grow;
        if (round_best && round_best->ci.point > 0.0) {
            grow = incremental_sample_size(round_best->ci.moe, round_best->ci.point, prm.e,
                                           round_best->blb_total, prm.blb_m);
            if (grow == 0) grow = 1;
        } else {
            // no margin to drive the growth rule; geometric fallback
            grow = sample.sample_size();
        }
        grow = std::min(grow, sample.remaining());
        sample.draw(grow);
        pending_delta = grow;
        out.s3_ms += ms_since(t_s3);
    }

    if (have_best) {
        out.found = true;
        out.guarantee_met = false;
        out.community = best_members;
        out.ci = best_ci;
        return out;
    }
    out.reason = std::string("query node is not in any ") + model_name(model) +
                 " community within its sampled neighborhood" +
                 (bounds ? " satisfying the size bounds" : "");
    return out;
}

inline SeaResult sea_search(const AttributedGraph& g, NodeId q, int k,
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
    return sea_search_impl(
        g.node_count(), g.node_count(), q, k, model,
        [&g](NodeId v) -> const std::vector<NodeId>& { return g.neighbors(v); },
        [&dist](NodeId v) { return dist(v); }, prm, bounds);
}

inline SeaResult sea_search_size_bounded(const AttributedGraph& g, NodeId q, int k,
                                         SizeBounds bounds, const DistanceEvaluator& dist,
                                         const SeaParams& prm, Model model = Model::kCore) {
    return sea_search(g, q, k, dist, prm, model, bounds);
}

}  // namespace attrcs
