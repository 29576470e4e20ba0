#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "attrcs/rng.hpp"
#include "attrcs/types.hpp"

namespace attrcs {

struct HoeffdingParams {
    double epsilon = 0.05;  // estimation error for the containment bound
    double beta = 0.05;     // 1 - beta = containment probability
};

// Minimum number of nodes the query neighborhood needs so that all
// min_community nodes of the target community are contained with probability
// 1-beta: ceil((2/eps^2) * ln(m(n-m)/beta)) + 1, capped at the population.
inline std::size_t min_neighborhood_size(std::size_t n, std::size_t min_community, double epsilon,
                                         double beta) {
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (beta <= 0.0 || beta >= 1.0) throw std::invalid_argument("beta must be in (0,1)");
    if (min_community < 1) throw std::invalid_argument("min_community must be >= 1");
    if (n <= min_community) return n;
    const double m = static_cast<double>(min_community);
    const double term =
        (2.0 / (epsilon * epsilon)) * std::log(m * (static_cast<double>(n) - m) / beta);
    const double req = std::ceil(term) + 1.0;
    if (req >= static_cast<double>(n)) return n;
    return static_cast<std::size_t>(req);
}

inline std::size_t min_neighborhood_size(std::size_t n, std::size_t min_community,
                                         const HoeffdingParams& hp) {
    return min_neighborhood_size(n, min_community, hp.epsilon, hp.beta);
}

// Best-first expansion from q: the frontier is ordered by (f(.,q), id) and
// nodes are finalized in pop order, so smaller attribute distances are
// reached first and any prefix of the output is itself a valid smaller
// neighborhood.
template <class NeighborFn, class Dist>
std::vector<NodeId> build_neighborhood(NodeId q, std::size_t target_size, std::size_t n_hint,
                                       NeighborFn&& nbrs, Dist&& dist) {
    if (target_size == 0) target_size = 1;
    struct Entry {
        double dist;
        NodeId id;
        bool operator>(const Entry& o) const {
            if (dist != o.dist) return dist > o.dist;
            return id > o.id;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> frontier;
    std::vector<char> seen(n_hint, 0);
    std::vector<NodeId> out;
    out.reserve(target_size);
    frontier.push({0.0, q});
    seen[q] = 1;
    while (!frontier.empty() && out.size() < target_size) {
        const Entry e = frontier.top();
        frontier.pop();
        out.push_back(e.id);
        for (NodeId u : nbrs(e.id)) {
            if (seen[u]) continue;
            seen[u] = 1;
            frontier.push({dist(u), u});
        }
    }
    return out;
}

// P_s(v) proportional to 1 - f(v,q), normalized over the member list; falls
// back to uniform when every member is maximally distant.
template <class Dist>
std::vector<double> sampling_probabilities(const std::vector<NodeId>& members, Dist&& dist) {
    if (members.empty()) throw std::invalid_argument("empty member list");
    std::vector<double> p(members.size());
    double total = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        p[i] = std::max(0.0, 1.0 - dist(members[i]));
        total += p[i];
    }
    if (total <= 0.0) {
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(members.size()));
        return p;
    }
    for (auto& x : p) x /= total;
    return p;
}

// Growth rule for the sample between estimation rounds:
// ceil(|S_blb| * ((moe / (delta* e/(1+e)))^(2m) - 1)), at least 1 when growth
// is needed, 0 when the margin already meets the threshold.
inline std::size_t incremental_sample_size(double moe, double delta_star, double e,
                                           std::size_t blb_total, double m_scale) {
    if (delta_star <= 0.0)
        throw std::domain_error("relative error is undefined at a zero optimum");
    const double threshold = delta_star * e / (1.0 + e);
    if (moe <= threshold) return 0;
    const double grow = std::pow(moe / threshold, 2.0 * m_scale) - 1.0;
    const double v = std::ceil(static_cast<double>(blb_total) * grow);
    return std::max<std::size_t>(1, static_cast<std::size_t>(v));
}

struct DrawResult {
    std::vector<NodeId> drawn;  // in neighborhood order
    bool exhausted = false;
};

// Sampling state over a fixed neighborhood. q is force-included up front and
// never consumes draw counts. Draws are weighted without replacement
// (exponential race keys), each round renormalizing implicitly over the
// remaining unsampled members; everything is a pure function of the seed.
class SampleState {
public:
    template <class Dist>
    SampleState(std::vector<NodeId> neighborhood, NodeId q, Dist&& dist, std::uint64_t seed,
                double lambda)
        : neighborhood_(std::move(neighborhood)), q_(q), seed_(seed), lambda_(lambda) {
        weights_.resize(neighborhood_.size());
        for (std::size_t i = 0; i < neighborhood_.size(); ++i)
            weights_[i] = std::max(0.0, 1.0 - dist(neighborhood_[i]));
        bool all_zero = true;
        for (double w : weights_)
            if (w > 0.0) {
                all_zero = false;
                break;
            }
        if (all_zero) std::fill(weights_.begin(), weights_.end(), 1.0);
        sampled_.assign(neighborhood_.size(), 0);
        for (std::size_t i = 0; i < neighborhood_.size(); ++i) {
            if (neighborhood_[i] == q_) {
                sampled_[i] = 1;
                ++sampled_count_;
            }
        }
    }

    std::size_t neighborhood_size() const { return neighborhood_.size(); }
    std::size_t sample_size() const { return sampled_count_; }
    std::size_t remaining() const { return neighborhood_.size() - sampled_count_; }
    double lambda() const { return lambda_; }
    const std::vector<NodeId>& neighborhood() const { return neighborhood_; }

    std::size_t initial_count() const {
        const auto want = static_cast<std::size_t>(
            std::ceil(lambda_ * static_cast<double>(neighborhood_.size())));
        return std::max<std::size_t>(1, std::min(want, remaining()));
    }

    DrawResult draw(std::size_t count) {
        DrawResult res;
        Rng rng(derive_seed(seed_, 0xd4a7ULL, round_++));
        struct Keyed {
            double key;
            NodeId id;
            std::size_t idx;
        };
        std::vector<Keyed> race;
        race.reserve(remaining());
        for (std::size_t i = 0; i < neighborhood_.size(); ++i) {
            const double key = rng.race_key(weights_[i]);  // always consume the stream
            if (!sampled_[i]) race.push_back({key, neighborhood_[i], i});
        }
        if (count >= race.size()) {
            res.exhausted = count > race.size();
            for (const auto& kv : race) {
                sampled_[kv.idx] = 1;
                res.drawn.push_back(kv.id);
            }
            sampled_count_ += race.size();
            std::sort(res.drawn.begin(), res.drawn.end());
            return res;
        }
        std::nth_element(race.begin(), race.begin() + count, race.end(),
                         [](const Keyed& a, const Keyed& b) {
                             if (a.key != b.key) return a.key < b.key;
                             return a.id < b.id;
                         });
        for (std::size_t i = 0; i < count; ++i) {
            sampled_[race[i].idx] = 1;
            res.drawn.push_back(race[i].id);
        }
        sampled_count_ += count;
        std::sort(res.drawn.begin(), res.drawn.end());
        return res;
    }

    std::vector<NodeId> sample_members() const {
        std::vector<NodeId> out;
        out.reserve(sampled_count_);
        for (std::size_t i = 0; i < neighborhood_.size(); ++i)
            if (sampled_[i]) out.push_back(neighborhood_[i]);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<NodeId> neighborhood_;
    std::vector<double> weights_;
    std::vector<char> sampled_;
    std::size_t sampled_count_ = 0;
    NodeId q_;
    std::uint64_t seed_;
    double lambda_;
    std::uint64_t round_ = 0;
};

}  // namespace attrcs
