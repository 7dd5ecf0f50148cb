#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "w3r/rng.hpp"
#include "w3r/trust_network.hpp"

namespace w3r {

struct GossipConfig {
    std::size_t fanout = 2;           //!< f: peers contacted per node per round
    std::size_t edgesPerMessage = 8;  //!< m
    double softmaxTemperature = 0.1;  //!< T, applied to recency normalized to [0,1]
    std::size_t rounds = 50;
    std::uint64_t rngSeed = 0;

    void validate() const {
        if (fanout == 0) throw std::invalid_argument("gossip fanout must be >= 1");
        if (edgesPerMessage == 0) throw std::invalid_argument("edges per message must be >= 1");
        if (!(softmaxTemperature > 0.0)) throw std::invalid_argument("softmax temperature must be > 0");
    }
};

struct GossipMessage {
    std::size_t sender = 0;
    std::vector<TimedEdge> edges;
};

struct SimState {
    std::vector<TrustNetwork> replicas;
    std::vector<std::vector<std::size_t>> topology; //!< peers of each replica
    std::size_t roundClock = 0;

    static std::vector<std::vector<std::size_t>> completeTopology(std::size_t n) {
        std::vector<std::vector<std::size_t>> peers(n);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if (a != b) peers[a].push_back(b);
            }
        }
        return peers;
    }
};

//! Samples up to m edges without replacement, each draw proportional to
//! softmax(delta / T) where delta is the edge's age offset from the oldest
//! edge, normalized to [0,1] by the largest offset.
inline std::vector<TimedEdge> selectEdgesToGossip(const TrustNetwork& net, std::size_t m, double temperature, Rng& rng) {
    if (m == 0) throw std::invalid_argument("edges per message must be >= 1");
    if (!(temperature > 0.0)) throw std::invalid_argument("softmax temperature must be > 0");
    auto edges = net.edges();
    if (edges.size() <= m) return edges;

    Timestamp lo = edges.front().timestamp, hi = lo;
    for (const auto& e : edges) {
        lo = std::min(lo, e.timestamp);
        hi = std::max(hi, e.timestamp);
    }
    const double span = static_cast<double>(hi - lo);

    // Efraimidis-Spirakis keys log(u) / w reproduce sequential weighted
    // sampling without replacement; weights are shifted so the largest is 1.
    std::vector<std::pair<double, std::size_t>> keys;
    keys.reserve(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const double delta = span > 0.0 ? static_cast<double>(edges[k].timestamp - lo) / span : 0.0;
        const double weight = std::exp((delta - 1.0) / temperature);
        keys.emplace_back(std::log(rng.uniformOpen01()) / weight, k);
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(m), keys.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<TimedEdge> out;
    out.reserve(m);
    for (std::size_t k = 0; k < m; ++k) out.push_back(edges[keys[k].second]);
    return out;
}

//! Newest-version-wins merge of one gossiped edge.
inline bool mergeEdge(TrustNetwork& net, const TimedEdge& edge) { return net.merge(edge); }

//! Edges present in only one replica, or present in both with different timestamps.
inline std::size_t divergence(const TrustNetwork& a, const TrustNetwork& b) {
    const auto ea = a.edges();
    const auto eb = b.edges();
    auto key = [](const TimedEdge& e) { return std::tie(e.dst.kind, e.src.id, e.dst.id); };
    auto less = [&](const TimedEdge& x, const TimedEdge& y) { return key(x) < key(y); };
    std::vector<TimedEdge> sa = ea, sb = eb;
    std::sort(sa.begin(), sa.end(), less);
    std::sort(sb.begin(), sb.end(), less);
    std::size_t diff = 0, x = 0, y = 0;
    while (x < sa.size() || y < sb.size()) {
        if (y == sb.size() || (x < sa.size() && less(sa[x], sb[y]))) {
            ++diff;
            ++x;
        } else if (x == sa.size() || less(sb[y], sa[x])) {
            ++diff;
            ++y;
        } else {
            if (sa[x].timestamp != sb[y].timestamp) ++diff;
            ++x;
            ++y;
        }
    }
    return diff;
}

struct RoundStats {
    std::size_t round = 0;
    double meanPairwiseDivergence = 0.0;
    std::size_t maxDivergence = 0;
};

struct ConvergenceReport {
    std::vector<RoundStats> rounds; //!< round 0 is the initial state

    //! First round with zero divergence between every pair of replicas.
    std::optional<std::size_t> convergedAt() const {
        for (const auto& r : rounds) {
            if (r.maxDivergence == 0) return r.round;
        }
        return std::nullopt;
    }

    std::string toCsv() const {
        std::string out = "round,meanPairwiseDivergence,maxDivergence\n";
        char buf[64];
        for (const auto& r : rounds) {
            auto res = std::to_chars(buf, buf + sizeof(buf), r.meanPairwiseDivergence);
            out += std::to_string(r.round) + ',' + std::string(buf, res.ptr) + ',' + std::to_string(r.maxDivergence) + '\n';
        }
        return out;
    }
};

inline RoundStats measureDivergence(const SimState& state) {
    RoundStats stats;
    stats.round = state.roundClock;
    const std::size_t n = state.replicas.size();
    if (n < 2) return stats;
    std::size_t total = 0, pairs = 0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const std::size_t d = divergence(state.replicas[a], state.replicas[b]);
            total += d;
            stats.maxDivergence = std::max(stats.maxDivergence, d);
            ++pairs;
        }
    }
    stats.meanPairwiseDivergence = static_cast<double>(total) / static_cast<double>(pairs);
    return stats;
}

//! Synchronous rounds: every replica picks f peers uniformly from its
//! topology and sends each a freshly sampled message; all messages of a
//! round are applied after all have been generated.
inline ConvergenceReport runGossip(SimState& state, const GossipConfig& cfg) {
    cfg.validate();
    const std::size_t n = state.replicas.size();
    if (state.topology.empty()) state.topology = SimState::completeTopology(n);
    if (state.topology.size() != n) throw std::invalid_argument("topology size must match replica count");

    ConvergenceReport report;
    report.rounds.push_back(measureDivergence(state));
    std::vector<std::pair<std::size_t, GossipMessage>> inbox;
    std::vector<std::size_t> peers;
    for (std::size_t r = 0; r < cfg.rounds; ++r) {
        inbox.clear();
        for (std::size_t node = 0; node < n; ++node) {
            const auto& net = state.replicas[node];
            if (net.trustEdgeCount() + net.affinityEdgeCount() == 0) continue;
            Rng rng(cfg.rngSeed, rng_domain::kGossip, state.roundClock, node);
            peers = state.topology[node];
            const std::size_t contacts = std::min(cfg.fanout, peers.size());
            for (std::size_t k = 0; k < contacts; ++k) {
                std::swap(peers[k], peers[k + rng.below(peers.size() - k)]);
                inbox.emplace_back(peers[k], GossipMessage{node, selectEdgesToGossip(net, cfg.edgesPerMessage,
                                                                                   cfg.softmaxTemperature, rng)});
            }
        }
        for (const auto& [target, msg] : inbox) {
            for (const auto& e : msg.edges) mergeEdge(state.replicas[target], e);
        }
        ++state.roundClock;
        report.rounds.push_back(measureDivergence(state));
    }
    return report;
}

} // namespace w3r
